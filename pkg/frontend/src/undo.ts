/**
 * Bounded undo stack over annotation-set snapshots.  Snapshots are deep
 * clones taken before each mutation; undo restores exactly the previous
 * snapshot.  Redo is deliberately not offered.
 */

import type { AnnotationSet } from "./types.js";

export const UNDO_DEPTH = 50;

function clone(set: AnnotationSet): AnnotationSet {
  return {
    annotations: set.annotations.map((a) => ({
      ...a,
      bounds: { ...a.bounds },
      tokens: a.tokens === null ? null : a.tokens.map((t) => ({ ...t })),
    })),
    relations: set.relations.map((r) => ({ ...r, targetIds: [...r.targetIds] })),
  };
}

export class UndoStack {
  private readonly depth: number;
  private stack: AnnotationSet[] = [];

  constructor(depth: number = UNDO_DEPTH) {
    if (depth < 1) {
      throw new Error(`undo depth must be at least 1, got ${depth}`);
    }
    this.depth = depth;
  }

  get size(): number {
    return this.stack.length;
  }

  /** Record the state as it was before a mutation; oldest entries fall off. */
  push(set: AnnotationSet): void {
    this.stack.push(clone(set));
    if (this.stack.length > this.depth) {
      this.stack.shift();
    }
  }

  /** The most recent snapshot, or null when there is nothing to undo. */
  pop(): AnnotationSet | null {
    const top = this.stack.pop();
    return top === undefined ? null : clone(top);
  }

  clear(): void {
    this.stack = [];
  }
}
