/**
 * Wire types for the annotation service API.  Field names match the JSON
 * payloads exactly; everything here travels in point coordinates.
 */

import type { Bounds } from "./geometry.js";

export interface TokenRefWire {
  pageIndex: number;
  tokenIndex: number;
}

export interface WireAnnotation {
  id: string;
  page: number;
  label: string;
  bounds: Bounds;
  /** null for freeform boxes, token references for textual spans. */
  tokens: TokenRefWire[] | null;
}

export interface WireRelation {
  id: string;
  label: string;
  targetIds: string[];
}

export interface Label {
  text: string;
  color: string;
  freeform?: boolean;
}

export interface Schema {
  labels: Label[];
  relations: { text: string }[];
}

export interface StatusRecord {
  finished: boolean;
  junk: boolean;
  comments: string;
  completedAt: string | null;
}

export interface DocumentEntry {
  id: string;
  pages: number;
  assigned: boolean;
  status: StatusRecord | null;
}

export interface AnnotationSet {
  annotations: WireAnnotation[];
  relations: WireRelation[];
}

export interface AnnotationSetResponse extends AnnotationSet {
  revision: number;
}
