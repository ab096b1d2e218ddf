/**
 * The annotation workspace: full-document page surfaces with token and
 * annotation overlays, a sidebar for labels, zoom, relations and deletion,
 * and keyboard handling (CTRL hides label chips, modifier+z undoes).
 *
 * All persistent coordinates live in the PDF point frame; pixel rectangles
 * are recomputed from them on every render via rescaleBounds and are never
 * stored or posted.
 */

import { ApiError, type AnnotationApi } from "./api.js";
import {
  Bounds,
  DEFAULT_SNAP_PADDING,
  PageLayout,
  rescaleBounds,
  selectTokens,
  snapBounds,
} from "./geometry.js";
import { SaveQueue } from "./saver.js";
import { UndoStack } from "./undo.js";
import type { AnnotationSet, Label, Schema, WireAnnotation, WireRelation } from "./types.js";

export const PAGE_GAP_PX = 16;
export const THIN_HEIGHT_PX = 14;
export const DENSE_BOX_COUNT = 30;
export const BORDER_WIDTHS_PX = [3, 2, 1];

export interface AppOptions {
  /** Snap padding in points; must match the project's configured value. */
  snapPadding?: number;
  /** Confirmation hook for destructive cascades (default window.confirm). */
  confirmFn?: (message: string) => boolean;
  windowRef?: Window;
}

interface DragState {
  pageIndex: number;
  start: { x: number; y: number };
  current: { x: number; y: number };
}

function randomId(): string {
  if (typeof crypto !== "undefined" && typeof crypto.randomUUID === "function") {
    return crypto.randomUUID();
  }
  let out = "";
  for (let i = 0; i < 32; i += 1) {
    out += Math.floor(Math.random() * 16).toString(16);
  }
  return out;
}

function normalizedRect(a: { x: number; y: number }, b: { x: number; y: number }): Bounds {
  return {
    left: Math.min(a.x, b.x),
    top: Math.min(a.y, b.y),
    right: Math.max(a.x, b.x),
    bottom: Math.max(a.y, b.y),
  };
}

export class AnnotationApp {
  readonly api: AnnotationApi;
  readonly doc: string;

  private readonly root: HTMLElement;
  private readonly win: Window;
  private readonly confirmFn: (message: string) => boolean;
  private readonly snapPadding: number;
  private readonly undo = new UndoStack();
  private readonly saver: SaveQueue;

  private schema: Schema = { labels: [], relations: [] };
  private layouts: PageLayout[] = [];
  private annotations: WireAnnotation[] = [];
  private relations: WireRelation[] = [];
  private revisionValue = 0;
  private scaleValue = 1.0;
  private activeLabelName: string | null = null;
  private labelsHiddenFlag = false;
  private dirtyFlag = false;
  private drag: DragState | null = null;
  private picks = new Set<string>();
  private mutationSerial = 0;
  private loaded = false;

  private pagesEl!: HTMLElement;
  private pageEls: HTMLElement[] = [];
  private tokenSpans: HTMLElement[][] = [];

  private readonly onMouseMove = (e: MouseEvent) => this.handleMouseMove(e);
  private readonly onMouseUp = (e: MouseEvent) => this.handleMouseUp(e);
  private readonly onKeyDown = (e: KeyboardEvent) => this.handleKeyDown(e);
  private readonly onKeyUp = (e: KeyboardEvent) => this.handleKeyUp(e);
  private readonly onScroll = () => this.refreshBorders();

  constructor(root: HTMLElement, api: AnnotationApi, doc: string, options: AppOptions = {}) {
    this.root = root;
    this.api = api;
    this.doc = doc;
    this.win = options.windowRef ?? window;
    this.confirmFn = options.confirmFn ?? ((message) => this.win.confirm(message));
    this.snapPadding = options.snapPadding ?? DEFAULT_SNAP_PADDING;
    this.saver = new SaveQueue((set) => this.api.saveAnnotations(this.doc, set));
  }

  // -- read-only state for callers and tests -------------------------------

  get currentAnnotations(): WireAnnotation[] {
    return this.annotations.map((a) => ({ ...a, bounds: { ...a.bounds } }));
  }

  get currentRelations(): WireRelation[] {
    return this.relations.map((r) => ({ ...r, targetIds: [...r.targetIds] }));
  }

  get revision(): number {
    return this.revisionValue;
  }

  get scale(): number {
    return this.scaleValue;
  }

  get dirty(): boolean {
    return this.dirtyFlag;
  }

  get labelsHidden(): boolean {
    return this.labelsHiddenFlag;
  }

  get activeLabel(): Label | null {
    if (this.activeLabelName === null) {
      return null;
    }
    return this.schema.labels.find((l) => l.text === this.activeLabelName) ?? null;
  }

  get pickedIds(): string[] {
    return [...this.picks];
  }

  get savePending(): boolean {
    return this.saver.pending;
  }

  get undoDepth(): number {
    return this.undo.size;
  }

  // -- lifecycle ------------------------------------------------------------

  /** Fetch schema, layout and annotations, then render. False → banner shown. */
  async load(): Promise<boolean> {
    try {
      const [schema, layouts, setResponse] = await Promise.all([
        this.api.labels(),
        this.api.tokens(this.doc),
        this.api.annotations(this.doc),
      ]);
      this.schema = schema;
      this.layouts = layouts;
      this.annotations = setResponse.annotations;
      this.relations = setResponse.relations;
      this.revisionValue = setResponse.revision;
      this.activeLabelName = schema.labels.length > 0 ? schema.labels[0].text : null;
    } catch (err) {
      if (err instanceof ApiError && (err.status === 403 || err.status === 404)) {
        this.renderErrorBanner(err);
        return false;
      }
      throw err;
    }
    this.buildSkeleton();
    this.renderAll();
    this.win.addEventListener("mousemove", this.onMouseMove);
    this.win.addEventListener("mouseup", this.onMouseUp);
    this.win.addEventListener("keydown", this.onKeyDown);
    this.win.addEventListener("keyup", this.onKeyUp);
    this.win.addEventListener("scroll", this.onScroll);
    this.loaded = true;
    return true;
  }

  destroy(): void {
    this.win.removeEventListener("mousemove", this.onMouseMove);
    this.win.removeEventListener("mouseup", this.onMouseUp);
    this.win.removeEventListener("keydown", this.onKeyDown);
    this.win.removeEventListener("keyup", this.onKeyUp);
    this.win.removeEventListener("scroll", this.onScroll);
    this.root.innerHTML = "";
    this.loaded = false;
  }

  private renderErrorBanner(err: ApiError): void {
    this.root.innerHTML = "";
    const banner = document.createElement("div");
    banner.className = "error-banner";
    const title = document.createElement("strong");
    title.textContent = err.status === 403 ? "Access denied" : "Document not found";
    const detail = document.createElement("span");
    detail.textContent = ` ${err.message}`;
    banner.append(title, detail);
    this.root.appendChild(banner);
  }

  // -- user actions ---------------------------------------------------------

  setActiveLabel(name: string): void {
    if (!this.schema.labels.some((l) => l.text === name)) {
      return;
    }
    this.activeLabelName = name;
    this.renderSidebar();
  }

  setZoom(scale: number): void {
    if (!(scale > 0)) {
      return;
    }
    this.scaleValue = scale;
    this.renderAll();
  }

  setLabelsHidden(hidden: boolean): void {
    if (this.labelsHiddenFlag === hidden) {
      return;
    }
    this.labelsHiddenFlag = hidden;
    this.root.classList.toggle("labels-hidden", hidden);
    for (const chip of this.root.querySelectorAll<HTMLElement>(".box-label")) {
      chip.hidden = hidden;
    }
  }

  undoLast(): void {
    const snapshot = this.undo.pop();
    if (snapshot === null) {
      return;
    }
    this.mutationSerial += 1;
    this.annotations = snapshot.annotations;
    this.relations = snapshot.relations;
    this.picks.clear();
    this.renderAll();
    this.scheduleSave();
  }

  deleteAnnotation(id: string): void {
    const index = this.annotations.findIndex((a) => a.id === id);
    if (index < 0) {
      return;
    }
    // relations that reference the annotation keep their other targets;
    // ones that would fall below two targets must go with it
    const doomed = this.relations.filter(
      (r) => r.targetIds.includes(id) && r.targetIds.filter((t) => t !== id).length < 2,
    );
    if (doomed.length > 0) {
      const labels = doomed.map((r) => r.label).join(", ");
      const ok = this.confirmFn(
        `Deleting this annotation also removes ${doomed.length} relation(s) (${labels}) ` +
          "that would be left with fewer than two targets. Continue?",
      );
      if (!ok) {
        return;
      }
    }
    this.pushUndo();
    this.annotations.splice(index, 1);
    const doomedIds = new Set(doomed.map((r) => r.id));
    this.relations = this.relations
      .filter((r) => !doomedIds.has(r.id))
      .map((r) => ({ ...r, targetIds: r.targetIds.filter((t) => t !== id) }));
    this.picks.delete(id);
    this.renderAll();
    this.scheduleSave();
  }

  deleteRelation(id: string): void {
    if (!this.relations.some((r) => r.id === id)) {
      return;
    }
    this.pushUndo();
    this.relations = this.relations.filter((r) => r.id !== id);
    this.renderAll();
    this.scheduleSave();
  }

  togglePick(id: string): void {
    if (this.picks.has(id)) {
      this.picks.delete(id);
    } else {
      this.picks.add(id);
    }
    this.renderAll();
  }

  openRelationModal(): void {
    if (this.picks.size < 2 || this.schema.relations.length === 0) {
      return;
    }
    const modal = this.root.querySelector<HTMLElement>(".relation-modal");
    if (modal !== null) {
      modal.hidden = false;
      this.renderRelationModal();
    }
  }

  closeRelationModal(): void {
    const modal = this.root.querySelector<HTMLElement>(".relation-modal");
    if (modal !== null) {
      modal.hidden = true;
    }
  }

  confirmRelation(): void {
    if (this.picks.size < 2) {
      return;
    }
    const select = this.root.querySelector<HTMLSelectElement>(".relation-label-select");
    if (select === null || select.value === "") {
      return;
    }
    this.pushUndo();
    this.relations.push({ id: randomId(), label: select.value, targetIds: [...this.picks] });
    this.picks.clear();
    this.closeRelationModal();
    this.renderAll();
    this.scheduleSave();
  }

  /** Post the current set as-is (used to retry after a failed save). */
  saveNow(): void {
    this.scheduleSave();
  }

  // -- persistence ----------------------------------------------------------

  private pushUndo(): void {
    this.mutationSerial += 1;
    this.undo.push({ annotations: this.annotations, relations: this.relations });
  }

  private currentSet(): AnnotationSet {
    return {
      annotations: this.annotations.map((a) => ({ ...a, bounds: { ...a.bounds } })),
      relations: this.relations.map((r) => ({ ...r, targetIds: [...r.targetIds] })),
    };
  }

  private scheduleSave(): void {
    const serial = this.mutationSerial;
    this.saver.submit(this.currentSet()).then(
      (response) => {
        this.revisionValue = response.revision;
        // adopt the canonical echo only if nothing changed locally meanwhile
        if (serial === this.mutationSerial) {
          this.annotations = response.annotations;
          this.relations = response.relations;
          this.dirtyFlag = false;
          if (this.loaded) {
            this.renderAll();
          }
        }
      },
      () => {
        this.dirtyFlag = true;
        if (this.loaded) {
          this.renderSidebar();
        }
      },
    );
  }

  // -- drag selection -------------------------------------------------------

  private pointOf(e: MouseEvent, pageIndex: number): { x: number; y: number } {
    const rect = this.pageEls[pageIndex].getBoundingClientRect();
    const page = this.layouts[pageIndex].page;
    const x = (e.clientX - rect.left) / this.scaleValue;
    const y = (e.clientY - rect.top) / this.scaleValue;
    // keep freeform rectangles inside the page
    return {
      x: Math.min(Math.max(x, 0), page.width),
      y: Math.min(Math.max(y, 0), page.height),
    };
  }

  private handlePageMouseDown(e: MouseEvent, pageIndex: number): void {
    if (e.button !== 0 || this.activeLabel === null) {
      return;
    }
    e.preventDefault();
    const point = this.pointOf(e, pageIndex);
    this.drag = { pageIndex, start: point, current: point };
    this.updateDragVisuals();
  }

  private handleMouseMove(e: MouseEvent): void {
    if (this.drag === null) {
      return;
    }
    this.drag.current = this.pointOf(e, this.drag.pageIndex);
    this.updateDragVisuals();
  }

  private handleMouseUp(e: MouseEvent): void {
    if (this.drag === null) {
      return;
    }
    this.drag.current = this.pointOf(e, this.drag.pageIndex);
    const drag = this.drag;
    this.drag = null;
    this.clearDragVisuals();
    this.commitSelection(drag);
  }

  /** Tokens currently highlighted mid-drag, in layout order. */
  highlightedTokens(): number[] {
    if (this.drag === null) {
      return [];
    }
    const label = this.activeLabel;
    if (label === null || label.freeform === true) {
      return [];
    }
    const rect = normalizedRect(this.drag.start, this.drag.current);
    return selectTokens(this.layouts[this.drag.pageIndex], rect);
  }

  private updateDragVisuals(): void {
    if (this.drag === null) {
      return;
    }
    const { pageIndex } = this.drag;
    const rect = normalizedRect(this.drag.start, this.drag.current);
    const preview = this.pageEls[pageIndex].querySelector<HTMLElement>(".drag-preview");
    if (preview !== null) {
      preview.hidden = false;
      this.placeBox(preview, rect, pageIndex);
    }
    const hits = new Set(this.highlightedTokens());
    this.tokenSpans[pageIndex].forEach((span, i) => {
      span.classList.toggle("hit", hits.has(i));
    });
  }

  private clearDragVisuals(): void {
    for (const pageEl of this.pageEls) {
      const preview = pageEl.querySelector<HTMLElement>(".drag-preview");
      if (preview !== null) {
        preview.hidden = true;
      }
    }
    for (const spans of this.tokenSpans) {
      for (const span of spans) {
        span.classList.remove("hit");
      }
    }
  }

  private commitSelection(drag: DragState): void {
    const label = this.activeLabel;
    if (label === null) {
      return;
    }
    const rect = normalizedRect(drag.start, drag.current);
    const layout = this.layouts[drag.pageIndex];
    let created: WireAnnotation | null = null;
    if (label.freeform === true) {
      const area = (rect.right - rect.left) * (rect.bottom - rect.top);
      if (area > 0) {
        created = {
          id: randomId(),
          page: drag.pageIndex,
          label: label.text,
          bounds: rect,
          tokens: null,
        };
      }
    } else {
      const indices = selectTokens(layout, rect);
      if (indices.length > 0) {
        const tokens = indices.map((i) => layout.tokens[i]);
        created = {
          id: randomId(),
          page: drag.pageIndex,
          label: label.text,
          bounds: snapBounds(tokens, this.snapPadding, layout.page),
          tokens: indices.map((i) => ({ pageIndex: drag.pageIndex, tokenIndex: i })),
        };
      }
    }
    if (created === null) {
      return;
    }
    this.pushUndo();
    this.annotations.push(created);
    this.renderAll();
    this.scheduleSave();
  }

  // -- keyboard -------------------------------------------------------------

  private handleKeyDown(e: KeyboardEvent): void {
    if (e.key === "Control") {
      this.setLabelsHidden(true);
      return;
    }
    if ((e.ctrlKey || e.metaKey) && e.key.toLowerCase() === "z") {
      e.preventDefault();
      this.undoLast();
    }
  }

  private handleKeyUp(e: KeyboardEvent): void {
    if (e.key === "Control") {
      this.setLabelsHidden(false);
    }
  }

  // -- rendering ------------------------------------------------------------

  private buildSkeleton(): void {
    this.root.innerHTML = `
      <div class="app">
        <aside class="sidebar">
          <section>
            <h2>Labels</h2>
            <div class="label-list"></div>
          </section>
          <section>
            <h2>Zoom</h2>
            <button type="button" class="zoom-out">−</button>
            <span class="zoom-level"></span>
            <button type="button" class="zoom-in">+</button>
          </section>
          <section>
            <button type="button" class="relate-button" disabled></button>
          </section>
          <section>
            <h2>Annotations</h2>
            <ul class="annotation-list"></ul>
          </section>
          <section>
            <h2>Relations</h2>
            <ul class="relation-list"></ul>
          </section>
          <div class="dirty-flag" hidden>Unsaved changes</div>
        </aside>
        <main class="pages"></main>
        <div class="relation-modal" hidden>
          <div class="relation-modal-body">
            <h2>Create relation</h2>
            <p class="relation-count"></p>
            <select class="relation-label-select"></select>
            <button type="button" class="relation-confirm">Create</button>
            <button type="button" class="relation-cancel">Cancel</button>
          </div>
        </div>
      </div>
    `;
    this.pagesEl = this.root.querySelector<HTMLElement>(".pages")!;
    this.root.querySelector<HTMLElement>(".zoom-in")!.addEventListener("click", () => {
      this.setZoom(this.scaleValue * 1.25);
    });
    this.root.querySelector<HTMLElement>(".zoom-out")!.addEventListener("click", () => {
      this.setZoom(this.scaleValue * 0.8);
    });
    this.root.querySelector<HTMLElement>(".relate-button")!.addEventListener("click", () => {
      this.openRelationModal();
    });
    this.root.querySelector<HTMLElement>(".relation-confirm")!.addEventListener("click", () => {
      this.confirmRelation();
    });
    this.root.querySelector<HTMLElement>(".relation-cancel")!.addEventListener("click", () => {
      this.closeRelationModal();
    });
  }

  private renderAll(): void {
    if (this.pagesEl === undefined) {
      return;
    }
    this.renderSidebar();
    this.renderPages();
    this.refreshBorders();
  }

  private renderSidebar(): void {
    const labelList = this.root.querySelector<HTMLElement>(".label-list");
    if (labelList === null) {
      return;
    }
    labelList.innerHTML = "";
    for (const label of this.schema.labels) {
      const chip = document.createElement("button");
      chip.type = "button";
      chip.className = "label-chip";
      chip.dataset.label = label.text;
      chip.textContent = label.freeform === true ? `${label.text} (freeform)` : label.text;
      chip.style.borderColor = label.color;
      chip.classList.toggle("active", label.text === this.activeLabelName);
      chip.addEventListener("click", () => this.setActiveLabel(label.text));
      labelList.appendChild(chip);
    }

    this.root.querySelector<HTMLElement>(".zoom-level")!.textContent =
      `${Math.round(this.scaleValue * 100)}%`;

    const relate = this.root.querySelector<HTMLButtonElement>(".relate-button")!;
    relate.textContent = `Relate (${this.picks.size} selected)`;
    relate.disabled = this.picks.size < 2 || this.schema.relations.length === 0;

    const annotationList = this.root.querySelector<HTMLElement>(".annotation-list")!;
    annotationList.innerHTML = "";
    for (const ann of this.annotations) {
      const entry = document.createElement("li");
      entry.className = "annotation-entry";
      entry.dataset.id = ann.id;
      const text = document.createElement("span");
      text.textContent = `${ann.label} · page ${ann.page + 1}`;
      const del = document.createElement("button");
      del.type = "button";
      del.className = "delete-annotation";
      del.textContent = "delete";
      del.addEventListener("click", () => this.deleteAnnotation(ann.id));
      entry.append(text, del);
      annotationList.appendChild(entry);
    }

    const relationList = this.root.querySelector<HTMLElement>(".relation-list")!;
    relationList.innerHTML = "";
    for (const rel of this.relations) {
      const entry = document.createElement("li");
      entry.className = "relation-entry";
      entry.dataset.id = rel.id;
      const text = document.createElement("span");
      text.textContent = `${rel.label} (${rel.targetIds.length})`;
      const del = document.createElement("button");
      del.type = "button";
      del.className = "delete-relation";
      del.textContent = "delete";
      del.addEventListener("click", () => this.deleteRelation(rel.id));
      entry.append(text, del);
      relationList.appendChild(entry);
    }

    this.root.querySelector<HTMLElement>(".dirty-flag")!.hidden = !this.dirtyFlag;
  }

  private renderRelationModal(): void {
    const count = this.root.querySelector<HTMLElement>(".relation-count");
    if (count !== null) {
      count.textContent = `${this.picks.size} annotations selected`;
    }
    const select = this.root.querySelector<HTMLSelectElement>(".relation-label-select")!;
    select.innerHTML = "";
    for (const rel of this.schema.relations) {
      const option = document.createElement("option");
      option.value = rel.text;
      option.textContent = rel.text;
      select.appendChild(option);
    }
    const confirm = this.root.querySelector<HTMLButtonElement>(".relation-confirm")!;
    confirm.disabled = this.picks.size < 2;
  }

  /** Pixel rectangle for a point-frame box on a page at the current zoom. */
  private pixelRect(bounds: Bounds, pageIndex: number): Bounds {
    const page = this.layouts[pageIndex].page;
    return rescaleBounds(
      bounds,
      [page.width, page.height],
      [page.width * this.scaleValue, page.height * this.scaleValue],
    );
  }

  private placeBox(el: HTMLElement, bounds: Bounds, pageIndex: number): void {
    const px = this.pixelRect(bounds, pageIndex);
    el.style.left = `${px.left}px`;
    el.style.top = `${px.top}px`;
    el.style.width = `${px.right - px.left}px`;
    el.style.height = `${px.bottom - px.top}px`;
  }

  private renderPages(): void {
    this.pagesEl.innerHTML = "";
    this.pageEls = [];
    this.tokenSpans = [];
    this.layouts.forEach((layout, pageIndex) => {
      const pageEl = document.createElement("div");
      pageEl.className = "page";
      pageEl.dataset.page = String(pageIndex);
      pageEl.style.width = `${layout.page.width * this.scaleValue}px`;
      pageEl.style.height = `${layout.page.height * this.scaleValue}px`;
      pageEl.style.marginBottom = `${PAGE_GAP_PX}px`;
      pageEl.addEventListener("mousedown", (e) => this.handlePageMouseDown(e, pageIndex));

      const tokenLayer = document.createElement("div");
      tokenLayer.className = "token-layer";
      const spans: HTMLElement[] = [];
      layout.tokens.forEach((token, tokenIndex) => {
        const span = document.createElement("span");
        span.className = "token";
        span.dataset.index = String(tokenIndex);
        span.textContent = token.text;
        this.placeBox(
          span,
          {
            left: token.x,
            top: token.y,
            right: token.x + token.width,
            bottom: token.y + token.height,
          },
          pageIndex,
        );
        span.style.fontSize = `${token.height * this.scaleValue * 0.85}px`;
        tokenLayer.appendChild(span);
        spans.push(span);
      });
      this.tokenSpans.push(spans);

      const annotationLayer = document.createElement("div");
      annotationLayer.className = "annotation-layer";
      for (const ann of this.annotations) {
        if (ann.page !== pageIndex) {
          continue;
        }
        const box = document.createElement("div");
        box.className = "annotation-box";
        box.dataset.id = ann.id;
        box.style.borderColor = this.labelColor(ann.label);
        box.classList.toggle("picked", this.picks.has(ann.id));
        this.placeBox(box, ann.bounds, pageIndex);
        const chip = document.createElement("span");
        chip.className = "box-label";
        chip.textContent = ann.label;
        chip.style.backgroundColor = this.labelColor(ann.label);
        chip.hidden = this.labelsHiddenFlag;
        box.appendChild(chip);
        box.addEventListener("mousedown", (e) => {
          // a click on a box is a relation pick, not the start of a drag
          e.stopPropagation();
          e.preventDefault();
          this.togglePick(ann.id);
        });
        annotationLayer.appendChild(box);
      }

      const preview = document.createElement("div");
      preview.className = "drag-preview";
      preview.hidden = true;

      pageEl.append(tokenLayer, annotationLayer, preview);
      this.pagesEl.appendChild(pageEl);
      this.pageEls.push(pageEl);
    });
  }

  private labelColor(name: string): string {
    return this.schema.labels.find((l) => l.text === name)?.color ?? "#666666";
  }

  /**
   * Recompute border weights from the current viewport.  Page offsets come
   * from our own layout bookkeeping (page heights and gaps), so this works
   * without forced reflows.
   */
  refreshBorders(): void {
    if (this.pageEls.length === 0) {
      return;
    }
    const offsets: number[] = [];
    let y = 0;
    for (const layout of this.layouts) {
      offsets.push(y);
      y += layout.page.height * this.scaleValue + PAGE_GAP_PX;
    }
    const viewTop = this.win.scrollY;
    const viewBottom = viewTop + this.win.innerHeight;

    let inView = 0;
    const heights = new Map<string, number>();
    for (const ann of this.annotations) {
      const px = this.pixelRect(ann.bounds, ann.page);
      const top = offsets[ann.page] + px.top;
      const bottom = offsets[ann.page] + px.bottom;
      heights.set(ann.id, px.bottom - px.top);
      if (bottom > viewTop && top < viewBottom) {
        inView += 1;
      }
    }
    const dense = inView > DENSE_BOX_COUNT;

    for (const box of this.root.querySelectorAll<HTMLElement>(".annotation-box")) {
      const id = box.dataset.id ?? "";
      const height = heights.get(id) ?? Number.POSITIVE_INFINITY;
      let step = 0;
      if (height < THIN_HEIGHT_PX) {
        step += 1;
      }
      if (dense) {
        step += 1;
      }
      const width = BORDER_WIDTHS_PX[Math.min(step, BORDER_WIDTHS_PX.length - 1)];
      box.style.borderWidth = `${width}px`;
    }
  }
}
