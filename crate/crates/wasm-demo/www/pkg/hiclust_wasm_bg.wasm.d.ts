/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_solution_free: (a: number, b: number) => void;
export const generate_clusters: (a: number, b: number, c: number, d: bigint) => [number, number];
export const smoothing_curve: (a: number, b: number, c: number) => [number, number, number, number];
export const solution_assignment: (a: number) => [number, number];
export const solution_centers: (a: number) => [number, number];
export const solution_cluster_centers: (a: number) => [number, number];
export const solution_continuous_cost: (a: number) => number;
export const solution_cost: (a: number) => number;
export const solution_rows: (a: number) => number;
export const solution_total_center: (a: number) => number;
export const solution_trajectory: (a: number) => [number, number];
export const solve: (a: number, b: number, c: number, d: number, e: number, f: bigint, g: number, h: number, i: number, j: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
