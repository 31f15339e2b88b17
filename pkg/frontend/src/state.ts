// Client view state. The tree is gated off for large projects until the
// user opts in; everything else is plain UI bookkeeping.

import type { ViewSpec } from "./types.js";

export const TREE_DISABLE_THRESHOLD = 500;

export type ViewMode = "tree" | "table" | "chat";

export interface UiViewState {
  mode: ViewMode;
  expandedNodeIds: Set<string>;
  collapsedNodeIds: Set<string>;
  focusedView: ViewSpec | null;
  treeEnabled: boolean;
}

export function initialViewState(artifactCount: number): UiViewState {
  const treeEnabled = artifactCount <= TREE_DISABLE_THRESHOLD;
  return {
    mode: treeEnabled ? "tree" : "table",
    expandedNodeIds: new Set(),
    collapsedNodeIds: new Set(),
    focusedView: null,
    treeEnabled,
  };
}

/** User opts into the tree despite the size gate (or a focused view is set). */
export function enableTree(state: UiViewState): void {
  state.treeEnabled = true;
}

export function toggleCollapsed(state: UiViewState, nodeId: string): void {
  if (state.collapsedNodeIds.has(nodeId)) {
    state.collapsedNodeIds.delete(nodeId);
    state.expandedNodeIds.add(nodeId);
  } else {
    state.collapsedNodeIds.add(nodeId);
    state.expandedNodeIds.delete(nodeId);
  }
}
