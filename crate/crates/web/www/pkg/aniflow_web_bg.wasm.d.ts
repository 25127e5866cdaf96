/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_flowdemo_free: (a: number, b: number) => void;
export const flowdemo_advance: (a: number, b: number) => [number, number, number];
export const flowdemo_boundary: (a: number) => [number, number];
export const flowdemo_functional: (a: number) => number;
export const flowdemo_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const flowdemo_ratio: (a: number) => number;
export const flowdemo_residual: (a: number) => number;
export const flowdemo_time: (a: number) => number;
export const polar_pair: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const subsolution_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
