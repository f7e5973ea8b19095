import { describe, expect, it } from 'vitest';

import {
  GENDER_CHOICES,
  OBJECT_CLASSES,
  RELATIONS,
  taskViewSchema,
  validateAnswer,
} from '../src/schema';

describe('vocabularies', () => {
  it('carries the 15 object classes', () => {
    expect(OBJECT_CLASSES).toHaveLength(15);
    expect(OBJECT_CLASSES).toContain('fire hydrant');
    expect(OBJECT_CLASSES).toContain('bike');
  });

  it('carries 4 relations and 3 gender choices', () => {
    expect(RELATIONS).toEqual(['above', 'below', 'left', 'right']);
    expect(GENDER_CHOICES).toEqual(['male', 'female', 'not_human']);
  });
});

describe('taskViewSchema', () => {
  it('accepts a 9-image gender task', () => {
    const view = {
      id: 'g1',
      kind: 'gender',
      image_urls: Array.from({ length: 9 }, (_, i) => `/images/i${i}`),
      allowed_answers: [...GENDER_CHOICES],
    };
    expect(taskViewSchema.parse(view).kind).toBe('gender');
  });

  it('rejects a gender task without exactly 9 images', () => {
    const view = { id: 'g1', kind: 'gender', image_urls: ['/images/i0'] };
    expect(() => taskViewSchema.parse(view)).toThrow(/9 image/);
  });

  it('rejects a skill task with more than one image', () => {
    const view = {
      id: 'o1',
      kind: 'skill_object',
      image_urls: ['/images/a', '/images/b'],
    };
    expect(() => taskViewSchema.parse(view)).toThrow(/1 image/);
  });
});

describe('validateAnswer', () => {
  it('accepts well-formed answers of every kind', () => {
    expect(validateAnswer('gender', { choice: 'female' })).toEqual([]);
    expect(validateAnswer('skill_object', { class: 'dog' })).toEqual([]);
    expect(validateAnswer('skill_count', { class: 'dog', count: 3 })).toEqual([]);
    expect(
      validateAnswer('skill_spatial', {
        class_a: 'dog',
        class_b: 'bench',
        relation: 'left',
      }),
    ).toEqual([]);
    expect(validateAnswer('skin_point', { x: 0, y: 5 })).toEqual([]);
  });

  it('names the offending field', () => {
    const errors = validateAnswer('gender', { choice: 'robot' });
    expect(errors).toHaveLength(1);
    expect(errors[0]).toMatch(/^choice:/);
  });

  it('rejects out-of-range counts', () => {
    expect(validateAnswer('skill_count', { class: 'dog', count: 5 })).not.toEqual([]);
    expect(validateAnswer('skill_count', { class: 'dog', count: 0 })).not.toEqual([]);
  });

  it('rejects unknown classes and relations', () => {
    expect(validateAnswer('skill_object', { class: 'zebra' })).not.toEqual([]);
    expect(
      validateAnswer('skill_spatial', {
        class_a: 'dog',
        class_b: 'dog',
        relation: 'behind',
      }),
    ).not.toEqual([]);
  });

  it('rejects non-integer or negative skin coordinates', () => {
    expect(validateAnswer('skin_point', { x: 1.5, y: 2 })).not.toEqual([]);
    expect(validateAnswer('skin_point', { x: -1, y: 2 })).not.toEqual([]);
    expect(validateAnswer('skin_point', { x: 1 })).not.toEqual([]);
  });
});
