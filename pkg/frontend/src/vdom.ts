/** A minimal deterministic element tree.
 *
 * The renderer builds plain trees of {tag, attrs, children}; `serialize`
 * emits markup with attributes in sorted order, so identical trees produce
 * identical strings (the snapshot-test contract). The browser shell mounts
 * the serialized markup and attaches delegated event listeners.
 */

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  children: (VNode | string)[];
}

type Child = VNode | string | null | undefined | false;

export function h(
  tag: string,
  attrs: Record<string, string | number | null | undefined> = {},
  ...children: (Child | Child[])[]
): VNode {
  const cleaned: Record<string, string> = {};
  for (const key of Object.keys(attrs)) {
    const value = attrs[key];
    if (value !== null && value !== undefined) {
      cleaned[key] = typeof value === "number" ? fmt(value) : value;
    }
  }
  const flat: (VNode | string)[] = [];
  const push = (c: Child | Child[]) => {
    if (Array.isArray(c)) {
      c.forEach(push);
    } else if (c !== null && c !== undefined && c !== false) {
      flat.push(c);
    }
  };
  children.forEach(push);
  return { tag, attrs: cleaned, children: flat };
}

/** Deterministic number formatting: at most 3 decimals, no trailing zeros. */
export function fmt(n: number): string {
  if (Number.isInteger(n)) {
    return String(n);
  }
  let s = n.toFixed(3);
  s = s.replace(/0+$/, "").replace(/\.$/, "");
  return s === "-0" ? "0" : s;
}

const VOID_TAGS = new Set(["br", "hr", "img", "input"]);

export function escapeText(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function escapeAttr(text: string): string {
  return escapeText(text).replace(/"/g, "&quot;");
}

export function serialize(node: VNode | string): string {
  if (typeof node === "string") {
    return escapeText(node);
  }
  const attrs = Object.keys(node.attrs)
    .sort()
    .map((k) => ` ${k}="${escapeAttr(node.attrs[k])}"`)
    .join("");
  if (VOID_TAGS.has(node.tag) && node.children.length === 0) {
    return `<${node.tag}${attrs}/>`;
  }
  const inner = node.children.map(serialize).join("");
  return `<${node.tag}${attrs}>${inner}</${node.tag}>`;
}

/** Depth-first walk over element nodes. */
export function walk(node: VNode, visit: (n: VNode) => void): void {
  visit(node);
  for (const child of node.children) {
    if (typeof child !== "string") {
      walk(child, visit);
    }
  }
}

/** All element nodes whose class attribute contains the given class name. */
export function findByClass(root: VNode, className: string): VNode[] {
  const out: VNode[] = [];
  walk(root, (n) => {
    const cls = n.attrs["class"];
    if (cls && cls.split(/\s+/).includes(className)) {
      out.push(n);
    }
  });
  return out;
}

export function textContent(node: VNode): string {
  let out = "";
  for (const child of node.children) {
    out += typeof child === "string" ? child : textContent(child);
  }
  return out;
}
