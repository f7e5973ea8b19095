import { z } from 'zod';

/**
 * Client-side mirror of the annotation service's published schema. The UI
 * must never be able to POST a payload the service would reject for shape,
 * so every vocabulary and bound here matches the server exactly.
 */

export const OBJECT_CLASSES = [
  'airplane',
  'bear',
  'bench',
  'bike',
  'bird',
  'boat',
  'car',
  'dog',
  'fire hydrant',
  'person',
  'potted plant',
  'stop sign',
  'suitcase',
  'traffic light',
  'umbrella',
] as const;

export const RELATIONS = ['above', 'below', 'left', 'right'] as const;
export const GENDER_CHOICES = ['male', 'female', 'not_human'] as const;
export const COUNTS = [1, 2, 3, 4] as const;

export const TASK_KINDS = [
  'skill_object',
  'skill_count',
  'skill_spatial',
  'gender',
  'skin_point',
] as const;

export type TaskKind = (typeof TASK_KINDS)[number];

export const taskViewSchema = z
  .object({
    id: z.string().min(1),
    kind: z.enum(TASK_KINDS),
    image_urls: z.array(z.string().min(1)),
    allowed_answers: z.array(z.string()).optional(),
    classes: z.array(z.string()).optional(),
    counts: z.array(z.number().int()).optional(),
    relations: z.array(z.string()).optional(),
  })
  .superRefine((view, ctx) => {
    const expected = view.kind === 'gender' ? 9 : 1;
    if (view.image_urls.length !== expected) {
      ctx.addIssue({
        code: z.ZodIssueCode.custom,
        message: `${view.kind} task must carry ${expected} image(s), got ${view.image_urls.length}`,
        path: ['image_urls'],
      });
    }
  });

export type TaskView = z.infer<typeof taskViewSchema>;

export const genderAnswerSchema = z.object({ choice: z.enum(GENDER_CHOICES) });
export const objectAnswerSchema = z.object({ class: z.enum(OBJECT_CLASSES) });
export const countAnswerSchema = z.object({
  class: z.enum(OBJECT_CLASSES),
  count: z.union([z.literal(1), z.literal(2), z.literal(3), z.literal(4)]),
});
export const spatialAnswerSchema = z.object({
  class_a: z.enum(OBJECT_CLASSES),
  class_b: z.enum(OBJECT_CLASSES),
  relation: z.enum(RELATIONS),
});
export const skinPointAnswerSchema = z.object({
  x: z.number().int().nonnegative(),
  y: z.number().int().nonnegative(),
});

const ANSWER_SCHEMAS: Record<TaskKind, z.ZodTypeAny> = {
  gender: genderAnswerSchema,
  skill_object: objectAnswerSchema,
  skill_count: countAnswerSchema,
  skill_spatial: spatialAnswerSchema,
  skin_point: skinPointAnswerSchema,
};

export type Answer =
  | z.infer<typeof genderAnswerSchema>
  | z.infer<typeof objectAnswerSchema>
  | z.infer<typeof countAnswerSchema>
  | z.infer<typeof spatialAnswerSchema>
  | z.infer<typeof skinPointAnswerSchema>;

export interface AnnotationRecord {
  worker_id: string;
  item_id: string;
  answer: Answer;
}

/** Returns human-readable field errors; empty array means submittable. */
export function validateAnswer(kind: TaskKind, answer: unknown): string[] {
  const result = ANSWER_SCHEMAS[kind].safeParse(answer);
  if (result.success) return [];
  return result.error.issues.map((issue) => {
    const path = issue.path.length > 0 ? issue.path.join('.') : 'answer';
    return `${path}: ${issue.message}`;
  });
}
