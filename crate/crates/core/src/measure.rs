//! Finite complex measures on the closed disk: atoms plus an optional
//! density on the boundary grid (with respect to normalized Lebesgue measure).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::{cplx, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub angle: f64,
    /// Distance from the origin; 1 for boundary atoms.
    #[serde(default = "unit_radius", skip_serializing_if = "is_unit")]
    pub radius: f64,
    #[serde(with = "cplx::pair")]
    pub weight: C64,
}

fn unit_radius() -> f64 {
    1.0
}

fn is_unit(r: &f64) -> bool {
    *r == 1.0
}

impl Atom {
    pub fn point(&self) -> C64 {
        C64::from_polar(self.radius, self.angle)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMeasure {
    pub atoms: Vec<Atom>,
    #[serde(default, with = "cplx::opt_pairs")]
    pub density: Option<Vec<C64>>,
}

impl BoundaryMeasure {
    /// Normalized Lebesgue measure `m` on a grid of `n` points.
    pub fn lebesgue(n: usize) -> Self {
        Self::from_density(vec![C64::new(1.0, 0.0); n])
    }

    pub fn from_density(density: Vec<C64>) -> Self {
        BoundaryMeasure {
            atoms: Vec::new(),
            density: Some(density),
        }
    }

    /// `c·δ_t` for a boundary point at angle `angle`.
    pub fn dirac(angle: f64, weight: C64) -> Self {
        BoundaryMeasure {
            atoms: vec![Atom {
                angle,
                radius: 1.0,
                weight,
            }],
            density: None,
        }
    }

    pub fn from_atoms(atoms: Vec<Atom>) -> Self {
        BoundaryMeasure {
            atoms,
            density: None,
        }
    }

    pub fn push_atom(&mut self, point: C64, weight: C64) {
        self.atoms.push(Atom {
            angle: point.arg(),
            radius: point.norm(),
            weight,
        });
    }

    pub fn total_variation(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.weight.norm()).sum();
        let dens = self
            .density
            .as_ref()
            .map(|d| d.iter().map(|v| v.norm()).sum::<f64>() / d.len() as f64)
            .unwrap_or(0.0);
        atoms + dens
    }

    /// Total mass `μ(𝕋)`.
    pub fn mass(&self) -> C64 {
        let atoms: C64 = self.atoms.iter().map(|a| a.weight).sum();
        let dens = self
            .density
            .as_ref()
            .map(|d| d.iter().sum::<C64>() / d.len() as f64)
            .unwrap_or_default();
        atoms + dens
    }

    /// Nonnegative means real weights ≥ −tol (imaginary parts within tol).
    pub fn is_nonnegative(&self, tol: f64) -> bool {
        let ok = |w: &C64| w.re >= -tol && w.im.abs() <= tol;
        self.atoms.iter().all(|a| ok(&a.weight))
            && self.density.as_ref().is_none_or(|d| d.iter().all(ok))
    }

    pub(crate) fn check_grid(&self, n: usize) -> Result<()> {
        match &self.density {
            Some(d) if d.len() != n => Err(Error::InvalidArgument(format!(
                "density has {} samples but the grid has {n}",
                d.len()
            ))),
            _ => Ok(()),
        }
    }

    pub(crate) fn check_closed_disk(&self) -> Result<()> {
        match self.atoms.iter().find(|a| !(a.radius >= 0.0 && a.radius <= 1.0 + 1e-12)) {
            Some(a) => Err(Error::OutsideDisk { modulus: a.radius }),
            None => Ok(()),
        }
    }

    /// Stable content hash, for tagging report rows.
    pub fn measure_id(&self) -> String {
        let mut h = Sha256::new();
        for a in &self.atoms {
            for v in [a.angle, a.radius, a.weight.re, a.weight.im] {
                h.update(v.to_le_bytes());
            }
        }
        if let Some(d) = &self.density {
            h.update(b"density");
            for v in d {
                h.update(v.re.to_le_bytes());
                h.update(v.im.to_le_bytes());
            }
        }
        hex::encode(&h.finalize()[..8])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut m = BoundaryMeasure::dirac(0.5, C64::new(2.0, 0.0));
        m.push_atom(C64::new(0.0, 0.5), C64::new(1.0, -1.0));
        m.density = Some(vec![C64::new(1.0, 0.0); 4]);
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with(r#"{"atoms":[{"angle":0.5,"weight":[2.0,0.0]},"#));
        let back: BoundaryMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn mass_and_variation() {
        let mut m = BoundaryMeasure::lebesgue(8);
        m.atoms.push(Atom {
            angle: 0.0,
            radius: 1.0,
            weight: C64::new(0.0, -3.0),
        });
        assert!((m.mass() - C64::new(1.0, -3.0)).norm() < 1e-15);
        assert!((m.total_variation() - 4.0).abs() < 1e-15);
        assert!(!m.is_nonnegative(1e-12));
    }
}
