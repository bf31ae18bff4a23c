use crate::error::{Error, Result};
use crate::experiments::data::random_field;
use crate::experiments::report::{Check, ExperimentOutput};
use crate::grid::{Field, Grid};
use crate::lorentz::{sobolev_lorentz_norm, weak_lp_norm};

/// Ratios of the fractional chain-rule inequalities for one field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeibnizRatios {
    /// `||Lambda^s(|u|^alpha u)||_{(p',inf)} / (||u||_{(p,inf)}^alpha ||Lambda^s u||_{(p,inf)})`, `p = alpha + 2`.
    pub chain: f64,
    /// `||Lambda^s(|u|^gamma u)||_{(p',inf)} / ||Lambda^s u||_{(p,inf)}^{gamma+1}`.
    pub chain_gamma: f64,
    /// `||u||_{(gamma p / alpha, inf)} / ||Lambda^s u||_{(p,inf)}`.
    pub embedding: f64,
}

const DEGENERATE: f64 = 1e-12;

fn power(u: &Field, k: f64) -> Field {
    u.map(|z| z * z.norm().powf(k))
}

/// `None` when a denominator falls below `1e-12`.
pub fn leibniz_ratios(u: &Field, s: f64, alpha: f64, gamma: f64) -> Result<Option<LeibnizRatios>> {
    let p = alpha + 2.0;
    let pd = p / (alpha + 1.0);
    let lu = sobolev_lorentz_norm(u, s, p)?;
    let nu = weak_lp_norm(u, p)?.norm;
    let den = nu.powf(alpha) * lu;
    let den_g = lu.powf(gamma + 1.0);
    if den < DEGENERATE || den_g < DEGENERATE || lu < DEGENERATE {
        return Ok(None);
    }
    let chain = sobolev_lorentz_norm(&power(u, alpha), s, pd)? / den;
    let chain_gamma = sobolev_lorentz_norm(&power(u, gamma), s, pd)? / den_g;
    let embedding = weak_lp_norm(u, gamma * p / alpha)?.norm / lu;
    Ok(Some(LeibnizRatios { chain, chain_gamma, embedding }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeibnizStats {
    pub ratios: Vec<LeibnizRatios>,
    pub skipped: usize,
    pub max_chain: f64,
    pub max_chain_gamma: f64,
    pub max_embedding: f64,
    /// Largest `|R(cu)/R(u) - 1|` over `c in {1/2, 2}` and all three ratios.
    pub scale_deviation: f64,
}

pub fn exp_leibniz_ratio(family: &[Field], s: f64, alpha: f64, gamma: f64) -> Result<LeibnizStats> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidArgument(format!("s = {s} must lie in (0, 1)")));
    }
    let mut ratios = Vec::new();
    let mut skipped = 0;
    let mut scale_deviation: f64 = 0.0;
    for u in family {
        let Some(r) = leibniz_ratios(u, s, alpha, gamma)? else {
            skipped += 1;
            continue;
        };
        for c in [0.5, 2.0] {
            if let Some(rc) = leibniz_ratios(&u.scale(c), s, alpha, gamma)? {
                for (x, y) in [(rc.chain, r.chain), (rc.chain_gamma, r.chain_gamma), (rc.embedding, r.embedding)] {
                    scale_deviation = scale_deviation.max((x / y - 1.0).abs());
                }
            }
        }
        ratios.push(r);
    }
    let mx = |f: fn(&LeibnizRatios) -> f64| ratios.iter().map(f).fold(0.0, f64::max);
    Ok(LeibnizStats {
        max_chain: mx(|r| r.chain),
        max_chain_gamma: mx(|r| r.chain_gamma),
        max_embedding: mx(|r| r.embedding),
        ratios,
        skipped,
        scale_deviation,
    })
}

/// Random band-limited family; identical continuous functions at every resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct LeibnizParams {
    pub dim: usize,
    pub size: usize,
    pub extent: f64,
    pub family_size: usize,
    pub modes: usize,
    pub amplitude: f64,
    pub seed: u64,
    pub s: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub scale_tolerance: f64,
    pub refinement_tolerance: f64,
}

impl Default for LeibnizParams {
    fn default() -> Self {
        LeibnizParams {
            dim: 2,
            size: 64,
            extent: 2.0 * std::f64::consts::PI,
            family_size: 50,
            modes: 4,
            amplitude: 1.0,
            seed: 20240601,
            s: 0.25,
            alpha: 2.0,
            gamma: 4.0,
            scale_tolerance: 0.01,
            refinement_tolerance: 0.2,
        }
    }
}

pub fn leibniz_family(grid: &Grid, p: &LeibnizParams) -> Vec<Field> {
    (0..p.family_size).map(|k| random_field(grid, p.amplitude, p.modes, p.seed.wrapping_add(k as u64))).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeibnizReport {
    pub coarse: LeibnizStats,
    pub fine: LeibnizStats,
    pub params: LeibnizParams,
}

impl LeibnizReport {
    /// Largest relative change of the three maxima under grid doubling.
    pub fn refinement_deviation(&self) -> f64 {
        [
            (self.fine.max_chain, self.coarse.max_chain),
            (self.fine.max_chain_gamma, self.coarse.max_chain_gamma),
            (self.fine.max_embedding, self.coarse.max_embedding),
        ]
        .iter()
        .map(|(a, b)| (a / b - 1.0).abs())
        .fold(0.0, f64::max)
    }

    pub fn checks(&self) -> Vec<Check> {
        let scale = self.coarse.scale_deviation.max(self.fine.scale_deviation);
        vec![
            Check::at_most("leibniz_scale_invariance", scale, self.params.scale_tolerance),
            Check::at_most("leibniz_refinement", self.refinement_deviation(), self.params.refinement_tolerance),
        ]
    }

    pub fn output(&self) -> ExperimentOutput {
        let mut out = ExperimentOutput::new(&["member", "grid_size", "chain", "chain_gamma", "embedding"]);
        for (tag, st) in [(self.params.size, &self.coarse), (2 * self.params.size, &self.fine)] {
            for (k, r) in st.ratios.iter().enumerate() {
                out.push_row(vec![k as f64, tag as f64, r.chain, r.chain_gamma, r.embedding]);
            }
        }
        out.note("max_chain_coarse", self.coarse.max_chain);
        out.note("max_chain_fine", self.fine.max_chain);
        out.note("max_chain_gamma_coarse", self.coarse.max_chain_gamma);
        out.note("max_chain_gamma_fine", self.fine.max_chain_gamma);
        out.note("max_embedding_coarse", self.coarse.max_embedding);
        out.note("max_embedding_fine", self.fine.max_embedding);
        out.note("skipped", self.coarse.skipped + self.fine.skipped);
        out.checks = self.checks();
        out
    }
}

pub fn exp_leibniz(p: &LeibnizParams) -> Result<LeibnizReport> {
    if p.family_size < 50 {
        return Err(Error::InvalidArgument("the Leibniz family needs at least 50 members".into()));
    }
    let coarse_grid = Grid::cubic(p.dim, p.size, p.extent)?;
    let fine_grid = Grid::cubic(p.dim, 2 * p.size, p.extent)?;
    let coarse = exp_leibniz_ratio(&leibniz_family(&coarse_grid, p), p.s, p.alpha, p.gamma)?;
    let fine = exp_leibniz_ratio(&leibniz_family(&fine_grid, p), p.s, p.alpha, p.gamma)?;
    Ok(LeibnizReport { coarse, fine, params: p.clone() })
}
