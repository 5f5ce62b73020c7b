/* tslint:disable */
/* eslint-disable */

/**
 * Tracked roots over a log-spaced k grid.
 */
export class Sweep {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    branch_count(): number;
    im(branch: number): Float64Array;
    k(): Float64Array;
    label(branch: number): string;
    re(branch: number): Float64Array;
}

export function dispersionSweep(model: string, rate: number, k_min: number, k_max: number, steps: number): Sweep;

export function harmonicSpectrum(omega0: number, count: number): Float64Array;

export function packetSnapshot(k0: number, sigma: number, n: number, length: number, t: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_sweep_free: (a: number, b: number) => void;
    readonly dispersionSweep: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly harmonicSpectrum: (a: number, b: number) => [number, number, number, number];
    readonly packetSnapshot: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly sweep_branch_count: (a: number) => number;
    readonly sweep_im: (a: number, b: number) => [number, number];
    readonly sweep_k: (a: number) => [number, number];
    readonly sweep_label: (a: number, b: number) => [number, number];
    readonly sweep_re: (a: number, b: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
