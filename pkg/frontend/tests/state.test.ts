import { describe, expect, it } from "vitest";

import {
  clearBrush,
  defaultState,
  isBrushed,
  setBrush,
  setHover,
  toggleBrush,
} from "../src/state.js";

describe("view state", () => {
  it("starts with hulls and summaries on, knn and matrices off", () => {
    const s = defaultState("abc");
    expect(s.hulls2d).toBe(true);
    expect(s.hullsHd).toBe(true);
    expect(s.summaryFeature).toBe("pos");
    expect(s.knn.enabled).toBe(false);
    expect(s.matrices.enabled).toBe(false);
    expect(s.brush).toEqual([]);
  });

  it("setBrush dedupes and sorts", () => {
    const s = setBrush(defaultState("x"), [9, 1, 9, 4]);
    expect(s.brush).toEqual([1, 4, 9]);
    expect(isBrushed(s, 4)).toBe(true);
    expect(isBrushed(s, 2)).toBe(false);
  });

  it("toggleBrush adds and removes", () => {
    let s = defaultState("x");
    s = toggleBrush(s, 5);
    expect(s.brush).toEqual([5]);
    s = toggleBrush(s, 2);
    expect(s.brush).toEqual([2, 5]);
    s = toggleBrush(s, 5);
    expect(s.brush).toEqual([2]);
  });

  it("clearBrush empties the selection and keeps other state", () => {
    let s = setBrush(defaultState("x"), [1, 2, 3]);
    s = setHover(s, 7);
    s = clearBrush(s);
    expect(s.brush).toEqual([]);
    expect(s.hover).toBe(7);
  });

  it("reducers do not mutate their input", () => {
    const base = defaultState("x");
    const brushed = setBrush(base, [1]);
    expect(base.brush).toEqual([]);
    expect(brushed).not.toBe(base);
  });
});
