/* tslint:disable */
/* eslint-disable */

/**
 * As [`decompose`], plus `S·A = V·SD·U` for square input.
 */
export function bruhat(text: string, domain: string, split: string): string;

/**
 * Factors the matrix and runs the independent checks.
 */
export function decompose(text: string, domain: string, split: string): string;

/**
 * A seeded `rows × cols` integer matrix of rank at most `rank`, as file
 * text.
 */
export function random_matrix(rows: number, cols: number, rank: number, seed: bigint): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly bruhat: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly decompose: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly random_matrix: (a: number, b: number, c: number, d: bigint) => [number, number];
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
