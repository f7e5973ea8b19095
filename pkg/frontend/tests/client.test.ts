import { describe, expect, it } from 'vitest';

import { HarnessClient, type FetchLike } from '../src/client';
import { AnnotationSession } from '../src/session';

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

const GENDER_TASK = {
  id: 'g1',
  kind: 'gender',
  image_urls: Array.from({ length: 9 }, (_, i) => `/images/i${i}`),
  allowed_answers: ['male', 'female', 'not_human'],
};

function scriptedFetch(responses: (() => Response | Error)[]) {
  const calls: { url: string; init?: RequestInit }[] = [];
  const impl: FetchLike = async (url, init) => {
    calls.push({ url, init });
    const next = responses.shift();
    if (next === undefined) throw new Error('unexpected request');
    const out = next();
    if (out instanceof Error) throw out;
    return out;
  };
  return { impl, calls };
}

const noSleep = async () => {};

describe('HarnessClient retries', () => {
  it('retries network failures with exponential backoff', async () => {
    const sleeps: number[] = [];
    const { impl, calls } = scriptedFetch([
      () => new Error('connection refused'),
      () => jsonResponse({}, 503),
      () => jsonResponse({ task: null }),
    ]);
    const client = new HarnessClient('http://x', {
      fetchImpl: impl,
      retries: 3,
      backoffMs: 100,
      sleep: async (ms) => {
        sleeps.push(ms);
      },
    });
    expect(await client.nextTask('w1')).toBeNull();
    expect(calls).toHaveLength(3);
    expect(sleeps).toEqual([100, 200]);
  });

  it('gives up after the configured attempts', async () => {
    const { impl } = scriptedFetch([
      () => new Error('down'),
      () => new Error('down'),
    ]);
    const client = new HarnessClient('http://x', {
      fetchImpl: impl,
      retries: 1,
      sleep: noSleep,
    });
    await expect(client.nextTask('w1')).rejects.toThrow('2 attempts');
  });

  it('does not retry a 400 validation rejection', async () => {
    const { impl, calls } = scriptedFetch([
      () => jsonResponse({ detail: { errors: ['choice: bad'] } }, 400),
    ]);
    const client = new HarnessClient('http://x', {
      fetchImpl: impl,
      sleep: noSleep,
    });
    const result = await client.submitAnnotation({
      worker_id: 'w1',
      item_id: 'g1',
      answer: { choice: 'male' },
    });
    expect(result).toEqual({ ok: false, errors: ['choice: bad'] });
    expect(calls).toHaveLength(1);
  });
});

describe('AnnotationSession', () => {
  it('blocks a second submit while one is in flight', async () => {
    let release!: () => void;
    const gate = new Promise<void>((r) => {
      release = r;
    });
    let served = false;
    let posts = 0;
    const slowFetch: FetchLike = async (url) => {
      if (url.includes('/annotations')) {
        posts += 1;
        await gate;
        return jsonResponse({ status: 'stored' });
      }
      const task = served ? null : GENDER_TASK;
      served = true;
      return jsonResponse({ task });
    };
    const client = new HarnessClient('http://x', { fetchImpl: slowFetch, sleep: noSleep });
    const session = new AnnotationSession(client, 'w1');
    await session.loadNext();

    const first = session.submit({ choice: 'male' });
    await expect(session.submit({ choice: 'female' })).rejects.toThrow('in flight');
    release();
    const outcome = await first;
    expect(outcome.accepted).toBe(true);
    expect(posts).toBe(1);
  });

  it('rejects an incomplete answer locally without a request', async () => {
    const { impl, calls } = scriptedFetch([
      () => jsonResponse({ task: GENDER_TASK }),
    ]);
    const client = new HarnessClient('http://x', { fetchImpl: impl, sleep: noSleep });
    const session = new AnnotationSession(client, 'w1');
    await session.loadNext();
    const outcome = await session.submit({ choice: 'robot' } as never);
    expect(outcome.accepted).toBe(false);
    expect(outcome.fieldErrors[0]).toMatch(/^choice:/);
    expect(calls).toHaveLength(1); // only the task fetch
  });

  it('surfaces server 400 errors and stays editable', async () => {
    const { impl } = scriptedFetch([
      () => jsonResponse({ task: GENDER_TASK }),
      () => jsonResponse({ detail: { errors: ['choice: rejected'] } }, 400),
    ]);
    const client = new HarnessClient('http://x', { fetchImpl: impl, sleep: noSleep });
    const session = new AnnotationSession(client, 'w1');
    await session.loadNext();
    const outcome = await session.submit({ choice: 'male' });
    expect(outcome).toEqual({ accepted: false, fieldErrors: ['choice: rejected'] });
    expect(session.currentState).toBe('working');
    expect(session.currentTask?.id).toBe('g1');
  });

  it('advances to the next task after acceptance', async () => {
    const { impl } = scriptedFetch([
      () => jsonResponse({ task: GENDER_TASK }),
      () => jsonResponse({ status: 'stored' }),
      () => jsonResponse({ task: null }),
    ]);
    const client = new HarnessClient('http://x', { fetchImpl: impl, sleep: noSleep });
    const session = new AnnotationSession(client, 'w1');
    await session.loadNext();
    const outcome = await session.submit({ choice: 'female' });
    expect(outcome.accepted).toBe(true);
    expect(session.currentState).toBe('done');
    expect(session.currentTask).toBeNull();
  });
});
