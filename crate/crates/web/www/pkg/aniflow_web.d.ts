/* tslint:disable */
/* eslint-disable */

/**
 * Flow of a convex curve, advanced from the page's animation loop.
 */
export class FlowDemo {
    free(): void;
    [Symbol.dispose](): void;
    advance(steps: number): boolean;
    /**
     * Interleaved boundary coordinates.
     */
    boundary(): Float64Array;
    functional(): number;
    constructor(shape: string, param: number, alpha: number, aniso: number, raw: boolean, nodes: number);
    ratio(): number;
    residual(): number;
    time(): number;
}

export function polar_pair(shape: string, param: number, nodes: number): Float64Array;

export function subsolution_curve(theta: number, q: number, t: number, samples: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_flowdemo_free: (a: number, b: number) => void;
    readonly flowdemo_advance: (a: number, b: number) => [number, number, number];
    readonly flowdemo_boundary: (a: number) => [number, number];
    readonly flowdemo_functional: (a: number) => number;
    readonly flowdemo_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly flowdemo_ratio: (a: number) => number;
    readonly flowdemo_residual: (a: number) => number;
    readonly flowdemo_time: (a: number) => number;
    readonly polar_pair: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly subsolution_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
