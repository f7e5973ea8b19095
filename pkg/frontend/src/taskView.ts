import {
  COUNTS,
  GENDER_CHOICES,
  OBJECT_CLASSES,
  RELATIONS,
  type TaskView,
  taskViewSchema,
} from './schema';

/**
 * Declarative page model built from a TaskView. The DOM layer renders this
 * directly; keeping it as data makes the per-kind layout testable without a
 * browser.
 */

export interface DropdownControl {
  type: 'dropdown';
  field: string;
  label: string;
  options: readonly (string | number)[];
  autocomplete: boolean;
}

export interface RadioControl {
  type: 'radio';
  field: string;
  label: string;
  options: readonly string[];
}

export interface ClickTargetControl {
  type: 'click-target';
  field: string;
  label: string;
  crosshair: true;
  zoomPreview: true;
}

export type Control = DropdownControl | RadioControl | ClickTargetControl;

export interface TaskPage {
  taskId: string;
  kind: TaskView['kind'];
  imageUrls: string[];
  gridColumns: number;
  controls: Control[];
}

function classDropdown(field: string, label: string): DropdownControl {
  return { type: 'dropdown', field, label, options: OBJECT_CLASSES, autocomplete: true };
}

export function renderTask(view: TaskView): TaskPage {
  const parsed = taskViewSchema.parse(view);
  const base = {
    taskId: parsed.id,
    kind: parsed.kind,
    imageUrls: parsed.image_urls,
    gridColumns: parsed.kind === 'gender' ? 3 : 1,
  };
  switch (parsed.kind) {
    case 'gender':
      return {
        ...base,
        controls: [
          {
            type: 'radio',
            field: 'choice',
            label: 'Most prominent gender',
            options: parsed.allowed_answers ?? GENDER_CHOICES,
          },
        ],
      };
    case 'skill_object':
      return { ...base, controls: [classDropdown('class', 'Object class')] };
    case 'skill_count':
      return {
        ...base,
        controls: [
          classDropdown('class', 'Object class'),
          {
            type: 'dropdown',
            field: 'count',
            label: 'How many',
            options: parsed.counts ?? COUNTS,
            autocomplete: false,
          },
        ],
      };
    case 'skill_spatial':
      return {
        ...base,
        controls: [
          classDropdown('class_a', 'First object'),
          classDropdown('class_b', 'Second object'),
          {
            type: 'dropdown',
            field: 'relation',
            label: 'Relation',
            options: parsed.relations ?? RELATIONS,
            autocomplete: false,
          },
        ],
      };
    case 'skin_point':
      return {
        ...base,
        controls: [
          {
            type: 'click-target',
            field: 'point',
            label: 'Click a skin pixel',
            crosshair: true,
            zoomPreview: true,
          },
        ],
      };
  }
}
