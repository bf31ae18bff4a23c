use serde::{Deserialize, Serialize};

/// Dispersion symbol `q` of the linear operator, `L^ u = q(xi) u^`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolKind {
    /// `-|xi|^2`
    Laplacian,
    /// `-(m1 xi_1^2 + xi_2^2)`, two dimensions.
    Anisotropic2 { m1: f64 },
    /// `-(w_kk/2 xi_1^2 + w_ll/2 xi_2^2 + w_nn/2 xi_3^2 + w_nk xi_1 xi_3)`, three dimensions.
    Shrira { omega_kk: f64, omega_ll: f64, omega_nn: f64, omega_nk: f64 },
    /// `mu |xi|^4`
    Biharmonic { mu: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionSymbol {
    #[serde(flatten)]
    pub kind: SymbolKind,
    /// Homogeneity degree `d`. Normally implied by the kind, but kept
    /// separate so a deliberately wrong value can be tested.
    pub degree: f64,
}

impl DispersionSymbol {
    pub fn new(kind: SymbolKind) -> Self {
        let degree = match kind {
            SymbolKind::Biharmonic { .. } => 4.0,
            _ => 2.0,
        };
        DispersionSymbol { kind, degree }
    }

    pub fn laplacian() -> Self {
        Self::new(SymbolKind::Laplacian)
    }

    pub fn anisotropic2(m1: f64) -> Self {
        Self::new(SymbolKind::Anisotropic2 { m1 })
    }

    pub fn shrira(omega_kk: f64, omega_ll: f64, omega_nn: f64, omega_nk: f64) -> Self {
        Self::new(SymbolKind::Shrira { omega_kk, omega_ll, omega_nn, omega_nk })
    }

    pub fn biharmonic(mu: f64) -> Self {
        Self::new(SymbolKind::Biharmonic { mu })
    }

    pub fn with_degree(mut self, d: f64) -> Self {
        self.degree = d;
        self
    }

    /// Required spatial dimension, if the kind fixes one.
    pub fn arity(&self) -> Option<usize> {
        match self.kind {
            SymbolKind::Anisotropic2 { .. } => Some(2),
            SymbolKind::Shrira { .. } => Some(3),
            _ => None,
        }
    }

    pub fn eval(&self, xi: &[f64; 3]) -> f64 {
        let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        match self.kind {
            SymbolKind::Laplacian => -r2,
            SymbolKind::Anisotropic2 { m1 } => -(m1 * xi[0] * xi[0] + xi[1] * xi[1]),
            SymbolKind::Shrira { omega_kk, omega_ll, omega_nn, omega_nk } => -(0.5 * omega_kk * xi[0] * xi[0]
                + 0.5 * omega_ll * xi[1] * xi[1]
                + 0.5 * omega_nn * xi[2] * xi[2]
                + omega_nk * xi[0] * xi[2]),
            SymbolKind::Biharmonic { mu } => mu * r2 * r2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            SymbolKind::Laplacian => "laplacian",
            SymbolKind::Anisotropic2 { .. } => "anisotropic2",
            SymbolKind::Shrira { .. } => "shrira",
            SymbolKind::Biharmonic { .. } => "biharmonic",
        }
    }

    /// Upper bound on the group speed `|grad q|` for wavenumbers up to `kmax`.
    pub fn max_group_speed(&self, kmax: f64) -> f64 {
        match self.kind {
            SymbolKind::Laplacian => 2.0 * kmax,
            SymbolKind::Anisotropic2 { m1 } => 2.0 * m1.abs().max(1.0) * kmax,
            SymbolKind::Shrira { omega_kk, omega_ll, omega_nn, omega_nk } => {
                let c = omega_kk.abs().max(omega_ll.abs()).max(omega_nn.abs()) + 2.0 * omega_nk.abs();
                c * kmax
            }
            SymbolKind::Biharmonic { mu } => 4.0 * mu.abs() * kmax.powi(3),
        }
    }
}
