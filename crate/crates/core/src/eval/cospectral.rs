use super::graphs::{connected_classes, laplacian_of, to_graph};
use super::EvalReport;
use crate::error::{Error, Result};
use crate::pipeline::{HashConfig, Hasher};
use crate::qpe::InputStrategy;
use crate::spectral::eigendecompose;
use crate::walk::WeightedGraph;

const SPECTRUM_TOL: f64 = 1e-9;

/// Two non-isomorphic connected graphs with equal Laplacian spectra.
#[derive(Debug, Clone)]
pub struct CospectralPair {
    pub vertices: usize,
    pub first: WeightedGraph,
    pub second: WeightedGraph,
    pub first_spectrum: Vec<f64>,
    pub second_spectrum: Vec<f64>,
}

impl CospectralPair {
    pub fn spectrum_gap(&self) -> f64 {
        self.first_spectrum
            .iter()
            .zip(&self.second_spectrum)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Exhaustive search over connected graphs on `2..=max_vertices` vertices.
/// The first pair in (vertex count, canonical mask) order is returned.
pub fn find_cospectral_pair(max_vertices: usize) -> Result<Option<CospectralPair>> {
    for n in 2..=max_vertices {
        let classes = connected_classes(n);
        let spectra = classes
            .iter()
            .map(|&m| Ok(eigendecompose(&laplacian_of(n, m))?.values))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..classes.len() {
            for j in i + 1..classes.len() {
                let same = spectra[i].iter().zip(&spectra[j]).all(|(a, b)| (a - b).abs() <= SPECTRUM_TOL);
                if same {
                    return Ok(Some(CospectralPair {
                        vertices: n,
                        first: to_graph(n, classes[i]),
                        second: to_graph(n, classes[j]),
                        first_spectrum: spectra[i].clone(),
                        second_spectrum: spectra[j].clone(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Finds a co-spectral pair and checks that ramp-input fingerprints tell the
/// two graphs apart while uniform input cannot.
pub fn cospectral_test(config: &HashConfig, max_vertices: usize) -> Result<EvalReport> {
    let pair = find_cospectral_pair(max_vertices)?.ok_or_else(|| {
        Error::Experiment(format!("no Laplacian-cospectral pair found on <= {max_vertices} vertices"))
    })?;
    let ramp = Hasher::new(HashConfig { input: InputStrategy::Ramp, ..config.clone() })?;
    let uniform = Hasher::new(HashConfig { input: InputStrategy::Uniform, ..config.clone() })?;
    let ra = ramp.analyze(&pair.first)?;
    let rb = ramp.analyze(&pair.second)?;
    let ua = uniform.analyze(&pair.first)?;
    let ub = uniform.analyze(&pair.second)?;

    let mut report = EvalReport::new(
        "cospectral",
        &ramp.config().config_id(),
        &["graph", "vertices", "edges", "eigenvalues", "ramp_fingerprint", "uniform_p0", "digest"],
    );
    report.param("max_vertices", max_vertices);
    for (label, g, spectrum, r, u) in [
        ("first", &pair.first, &pair.first_spectrum, &ra, &ua),
        ("second", &pair.second, &pair.second_spectrum, &rb, &ub),
    ] {
        report.push(vec![
            label.into(),
            pair.vertices.into(),
            g.to_json().into(),
            spectrum.clone().into(),
            r.fingerprint.values().to_vec().into(),
            u.distribution.probs()[0].into(),
            r.digest.to_hex().into(),
        ]);
    }
    let fingerprint_gap = ra.fingerprint.max_abs_diff(&rb.fingerprint);
    let spectrum_gap = pair.spectrum_gap();
    report.stat("spectrum_max_diff", spectrum_gap);
    report.stat("ramp_fingerprint_linf", fingerprint_gap);
    report.stat("ramp_distribution_linf", ra.distribution.max_abs_diff(&rb.distribution));
    report.stat("uniform_distribution_linf", ua.distribution.max_abs_diff(&ub.distribution));
    report.passed = spectrum_gap <= SPECTRUM_TOL && fingerprint_gap > 1e-6;
    Ok(report)
}
