/* tslint:disable */
/* eslint-disable */

/**
 * Result of [`solve`]: final centers, per-outer-iteration snapshots and the
 * snapped tree.
 */
export class Solution {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Index of the hub each node attaches to.
     */
    readonly assignment: Uint32Array;
    /**
     * Final artificial centers, flat; Model II has the total center last.
     */
    readonly centers: Float64Array;
    readonly cluster_centers: Uint32Array;
    readonly continuous_cost: number;
    readonly cost: number;
    /**
     * Center rows per snapshot.
     */
    readonly rows: number;
    readonly total_center: number;
    /**
     * Start and the centers after each outer iteration, concatenated.
     */
    readonly trajectory: Float64Array;
}

/**
 * Gaussian blobs with centers spread over `[0, 100]²`.
 */
export function generate_clusters(clusters: number, per_cluster: number, spread: number, seed: bigint): Float64Array;

/**
 * Samples `(r, ‖r‖, φ_µ(r))` for `r` from `-range` to `range` along one
 * axis, flat.
 */
export function smoothing_curve(mu: number, range: number, samples: number): Float64Array;

/**
 * Runs the continuation one outer step at a time to record the path of the
 * centers. `model` is `"I"` or `"II"`.
 */
export function solve(points: Float64Array, k: number, model: string, seed: bigint, mu0: number, sigma2: number, n_outer: number, n_inner: number): Solution;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_solution_free: (a: number, b: number) => void;
    readonly generate_clusters: (a: number, b: number, c: number, d: bigint) => [number, number];
    readonly smoothing_curve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly solution_assignment: (a: number) => [number, number];
    readonly solution_centers: (a: number) => [number, number];
    readonly solution_cluster_centers: (a: number) => [number, number];
    readonly solution_continuous_cost: (a: number) => number;
    readonly solution_cost: (a: number) => number;
    readonly solution_rows: (a: number) => number;
    readonly solution_total_center: (a: number) => number;
    readonly solution_trajectory: (a: number) => [number, number];
    readonly solve: (a: number, b: number, c: number, d: number, e: number, f: bigint, g: number, h: number, i: number, j: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
