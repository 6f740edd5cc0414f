//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Parameters cross the boundary as comma-separated strings (`"7/10,3/10"`)
//! and results as flat `Float64Array`s, so the page needs no glue beyond
//! wasm-bindgen's own.

use martinwalk::chain::sample_path;
use martinwalk::composition::{alpha_walk, closed_form_kernel_f64, kernel_limit_row, lattice_point, Composition, SimplexPoint};
use martinwalk::definetti::{estimate_directing_measure, ExchangeableSource};
use martinwalk::mc::McConfig;
use wasm_bindgen::prelude::*;

const MAX_STEPS: usize = 2_000_000;
const MAX_SAMPLES: usize = 20_000_000;

fn parse_point(text: &str) -> Result<SimplexPoint, String> {
    let coords: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    SimplexPoint::parse(&coords).map_err(|e| e.to_string())
}

fn parse_parts(text: &str) -> Result<Vec<u32>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("not a count: {s:?}")))
        .collect()
}

/// `Y_k / k` for `k = 1..=n` along one α-walk path, flattened with stride `d`.
pub fn simplex_path(alpha: &str, n: usize, seed: u64) -> Result<Vec<f64>, String> {
    if n > MAX_STEPS {
        return Err(format!("at most {MAX_STEPS} steps"));
    }
    let alpha = parse_point(alpha)?;
    let path = sample_path(&alpha_walk(&alpha), n, seed);
    let mut out = Vec::with_capacity(n * alpha.d());
    for (k, y) in path.iter().enumerate().skip(1) {
        out.extend(y.parts().iter().map(|&v| v as f64 / k as f64));
    }
    Ok(out)
}

/// `[K(x, round(nα)) for n in levels] ++ [K(x, α)]`.
pub fn kernel_curve(alpha: &str, x: &str, levels: &[u32]) -> Result<Vec<f64>, String> {
    let alpha = parse_point(alpha)?;
    let x = Composition::new(parse_parts(x)?);
    if x.d() != alpha.d() {
        return Err(format!("x has {} parts, alpha has {}", x.d(), alpha.d()));
    }
    let a = alpha.to_f64s();
    let mut out: Vec<f64> = levels.iter().map(|&n| closed_form_kernel_f64(x.d(), &x, &lattice_point(&a, n))).collect();
    out.push(kernel_limit_row(&x, &alpha, &[]).limit);
    Ok(out)
}

/// Directing-measure samples `Y_n / n`, flattened with stride `d`.
///
/// `kind` is `"polya"` with integer `params` (urn counts) or `"mixture"` with
/// `params` listing atoms separated by `;` and an optional `|`-separated weight list.
pub fn directing_samples(kind: &str, params: &str, horizon: usize, replicates: usize, seed: u64) -> Result<Vec<f64>, String> {
    if horizon == 0 || horizon.saturating_mul(replicates) > MAX_SAMPLES {
        return Err(format!("need 0 < horizon and horizon × replicates ≤ {MAX_SAMPLES}"));
    }
    let source = match kind {
        "polya" => {
            let counts = parse_parts(params)?.into_iter().map(u64::from).collect();
            ExchangeableSource::polya(counts).map_err(|e| e.to_string())?
        }
        "mixture" => {
            let (atoms, weights) = params.split_once('|').unwrap_or((params, ""));
            let atoms = atoms.split(';').map(parse_point).collect::<Result<Vec<_>, _>>()?;
            let weights = if weights.trim().is_empty() {
                vec![martinwalk::ProbValue::ratio(1, atoms.len() as i64); atoms.len()]
            } else {
                parse_point(weights)?.coords().to_vec()
            };
            ExchangeableSource::mixture(atoms, weights).map_err(|e| e.to_string())?
        }
        other => return Err(format!("unknown source kind {other:?}")),
    };
    let est = estimate_directing_measure(&source, horizon, McConfig::new(replicates, seed)).map_err(|e| e.to_string())?;
    Ok(est.samples.iter().flat_map(|s| s.to_f64s()).collect())
}

#[wasm_bindgen(js_name = simplexPath)]
pub fn simplex_path_js(alpha: &str, n: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    simplex_path(alpha, n, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = kernelCurve)]
pub fn kernel_curve_js(alpha: &str, x: &str, levels: Vec<u32>) -> Result<Vec<f64>, JsError> {
    kernel_curve(alpha, x, &levels).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = directingSamples)]
pub fn directing_samples_js(kind: &str, params: &str, horizon: usize, replicates: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    directing_samples(kind, params, horizon, replicates, seed).map_err(|e| JsError::new(&e))
}
