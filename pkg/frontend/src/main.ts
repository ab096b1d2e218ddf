/**
 * Entry point: resolve the annotator and document from the query string,
 * fall back to the first assigned document, and mount the workspace.
 */

import { ApiClient, ApiError } from "./api.js";
import { AnnotationApp } from "./app.js";

function showMessage(root: HTMLElement, title: string, detail: string): void {
  root.innerHTML = "";
  const banner = document.createElement("div");
  banner.className = "error-banner";
  const strong = document.createElement("strong");
  strong.textContent = title;
  const span = document.createElement("span");
  span.textContent = ` ${detail}`;
  banner.append(strong, span);
  root.appendChild(banner);
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (root === null) {
    return;
  }
  const params = new URLSearchParams(window.location.search);
  const annotator = params.get("annotator") ?? "development_user";
  const api = new ApiClient(annotator);

  let doc = params.get("doc");
  if (doc === null) {
    try {
      const documents = await api.listDocuments();
      const assigned = documents.find((d) => d.assigned);
      if (assigned === undefined) {
        showMessage(root, "Nothing to annotate", `No documents are assigned to ${annotator}.`);
        return;
      }
      doc = assigned.id;
    } catch (err) {
      const detail = err instanceof ApiError ? err.message : String(err);
      showMessage(root, "Service unavailable", detail);
      return;
    }
  }

  const app = new AnnotationApp(root, api, doc);
  try {
    await app.load();
  } catch (err) {
    const detail = err instanceof ApiError ? err.message : String(err);
    showMessage(root, "Failed to load document", detail);
  }
}

void boot();
