/* tslint:disable */
/* eslint-disable */

/**
 * `q(P)` at `points` evenly spaced values of `P` in `[0, p_max]`.
 */
export function q_curve(alpha: number, m_scale: number, p_max: number, points: number): Float64Array;

/**
 * Solves MaxCut on a random `degree`-regular graph with `U[-1, 1]` weights
 * and reports the result next to the exact optimum.
 */
export function solve_maxcut(n: number, degree: number, r: number, layers: number, seed: bigint): string;

/**
 * The `s` most probable flip configurations of independent variables with
 * flip probabilities `p`, as a JSON array of `{flips, probability}`.
 */
export function top_configurations(p: Float64Array, s: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly q_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly solve_maxcut: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number, number];
    readonly top_configurations: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
