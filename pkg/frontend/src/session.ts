import { type HarnessClient, type SubmitResult } from './client';
import { type Answer, type TaskView, validateAnswer } from './schema';

/**
 * One annotator's pass through the task queue. The backend decides task
 * order; the session only tracks the worker id, the current task, and an
 * in-flight flag that blocks double submission until the server answers.
 */

export type SessionState = 'idle' | 'working' | 'submitting' | 'done';

export interface SubmissionOutcome {
  accepted: boolean;
  fieldErrors: string[];
}

export class AnnotationSession {
  readonly workerId: string;
  private readonly client: HarnessClient;
  private task: TaskView | null = null;
  private state: SessionState = 'idle';

  constructor(client: HarnessClient, workerId: string) {
    this.client = client;
    this.workerId = workerId;
  }

  get currentTask(): TaskView | null {
    return this.task;
  }

  get currentState(): SessionState {
    return this.state;
  }

  async loadNext(): Promise<TaskView | null> {
    this.task = await this.client.nextTask(this.workerId);
    this.state = this.task === null ? 'done' : 'working';
    return this.task;
  }

  /**
   * Validates locally, then submits. Rejects double submission while a
   * request is in flight; a server-side 400 leaves the answer editable.
   */
  async submit(answer: Answer): Promise<SubmissionOutcome> {
    if (this.task === null) {
      throw new Error('no task loaded');
    }
    if (this.state === 'submitting') {
      throw new Error('submission already in flight');
    }
    const localErrors = validateAnswer(this.task.kind, answer);
    if (localErrors.length > 0) {
      return { accepted: false, fieldErrors: localErrors };
    }
    this.state = 'submitting';
    let result: SubmitResult;
    try {
      result = await this.client.submitAnnotation({
        worker_id: this.workerId,
        item_id: this.task.id,
        answer,
      });
    } finally {
      this.state = 'working';
    }
    if (!result.ok) {
      return { accepted: false, fieldErrors: result.errors };
    }
    await this.loadNext();
    return { accepted: true, fieldErrors: [] };
  }
}
