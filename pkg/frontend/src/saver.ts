/**
 * Per-document save serialization: at most one save request is in flight,
 * and while one is, newer submissions coalesce — a newer set supersedes a
 * queued one, and every superseded waiter settles with the outcome of the
 * save that actually ran.
 */

import type { AnnotationSet, AnnotationSetResponse } from "./types.js";

export type SaveFn = (set: AnnotationSet) => Promise<AnnotationSetResponse>;

interface Waiter {
  resolve: (value: AnnotationSetResponse) => void;
  reject: (reason: unknown) => void;
}

export class SaveQueue {
  private readonly save: SaveFn;
  private busy = false;
  private queued: { set: AnnotationSet; waiters: Waiter[] } | null = null;

  constructor(save: SaveFn) {
    this.save = save;
  }

  /** True while a save is running or waiting to run. */
  get pending(): boolean {
    return this.busy || this.queued !== null;
  }

  submit(set: AnnotationSet): Promise<AnnotationSetResponse> {
    return new Promise<AnnotationSetResponse>((resolve, reject) => {
      if (this.queued !== null) {
        // latest wins; earlier waiters ride along with the newer payload
        this.queued.set = set;
        this.queued.waiters.push({ resolve, reject });
      } else {
        this.queued = { set, waiters: [{ resolve, reject }] };
      }
      if (!this.busy) {
        void this.pump();
      }
    });
  }

  private async pump(): Promise<void> {
    this.busy = true;
    try {
      while (this.queued !== null) {
        const job = this.queued;
        this.queued = null;
        try {
          const result = await this.save(job.set);
          for (const w of job.waiters) {
            w.resolve(result);
          }
        } catch (err) {
          for (const w of job.waiters) {
            w.reject(err);
          }
        }
      }
    } finally {
      this.busy = false;
    }
  }
}
