//! WebAssembly bindings for the static demo page in `www/`.

pub mod demo;

use wasm_bindgen::prelude::*;

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// Flow of a convex curve, advanced from the page's animation loop.
#[wasm_bindgen]
pub struct FlowDemo(demo::Demo);

#[wasm_bindgen]
impl FlowDemo {
    #[wasm_bindgen(constructor)]
    pub fn new(shape: &str, param: f64, alpha: f64, aniso: f64, raw: bool, nodes: usize) -> Result<FlowDemo, JsError> {
        demo::Demo::new(shape, param, alpha, aniso, raw, nodes).map(FlowDemo).map_err(js)
    }

    pub fn advance(&mut self, steps: u32) -> Result<bool, JsError> {
        self.0.advance(steps).map_err(js)
    }

    /// Interleaved boundary coordinates.
    pub fn boundary(&self) -> Vec<f64> {
        self.0.boundary()
    }

    pub fn time(&self) -> f64 {
        self.0.time()
    }

    pub fn ratio(&self) -> f64 {
        self.0.ratio()
    }

    pub fn residual(&self) -> f64 {
        self.0.residual()
    }

    pub fn functional(&self) -> f64 {
        self.0.functional()
    }
}

#[wasm_bindgen]
pub fn polar_pair(shape: &str, param: f64, nodes: usize) -> Result<Vec<f64>, JsError> {
    demo::polar_pair(shape, param, nodes).map_err(js)
}

#[wasm_bindgen]
pub fn subsolution_curve(theta: f64, q: f64, t: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    demo::subsolution_curve(theta, q, t, samples).map_err(js)
}
