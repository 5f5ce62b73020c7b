/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_sweep_free: (a: number, b: number) => void;
export const dispersionSweep: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const harmonicSpectrum: (a: number, b: number) => [number, number, number, number];
export const packetSnapshot: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const sweep_branch_count: (a: number) => number;
export const sweep_im: (a: number, b: number) => [number, number];
export const sweep_k: (a: number) => [number, number];
export const sweep_label: (a: number, b: number) => [number, number];
export const sweep_re: (a: number, b: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
