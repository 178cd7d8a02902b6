//! Depleted-square (Lieb) lattice and its shear toward kagome geometry.
//!
//! The lattice lives on the integer grid `0 ..= 2L` in both directions, with
//! every point whose coordinates are both odd removed. Sites with two even
//! coordinates are corners; sites with exactly one odd coordinate sit at the
//! centers of horizontal or vertical corner-corner links. Nearest-neighbor
//! spacing is 1, so corner-corner spacing is 2 and the ordered-state Bragg
//! peak lands on (pi, pi).

use std::fmt;

use thiserror::Error;

/// Shear map at full strength sends (x, y) to (x + y/2, y * sqrt(3)/2),
/// turning every corner/edge/edge triangle equilateral.
const SHEAR_Y_SCALE: f64 = 0.866_025_403_784_438_6; // sqrt(3)/2

#[derive(Debug, Error, PartialEq)]
pub enum LatticeError {
    #[error("lattice size must be at least 1 unit cell per side")]
    ZeroSize,
    #[error("shear must lie in [0, 1], got {0}")]
    ShearOutOfRange(f64),
}

/// Role of a site, determined by the parity of its grid coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteRole {
    /// Both coordinates even.
    Corner,
    /// Odd x, even y: center of a horizontal corner-corner link.
    EdgeH,
    /// Even x, odd y: center of a vertical corner-corner link.
    EdgeV,
}

impl fmt::Display for SiteRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiteRole::Corner => write!(f, "corner"),
            SiteRole::EdgeH => write!(f, "edgeh"),
            SiteRole::EdgeV => write!(f, "edgev"),
        }
    }
}

/// Which coupling constant a bond carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BondClass {
    /// Corner-edge nearest-neighbor bond.
    J,
    /// Edge-edge anti-diagonal bond; zero in the pure Lieb limit.
    Jprime,
}

impl fmt::Display for BondClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BondClass::J => write!(f, "j"),
            BondClass::Jprime => write!(f, "jprime"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Site {
    pub gx: i32,
    pub gy: i32,
    pub role: SiteRole,
}

/// Undirected bond; `i < j` always.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub class: BondClass,
}

/// Open-boundary Lieb lattice with `3L^2 + 4L + 1` sites.
///
/// Immutable after construction; site and bond order is deterministic
/// (row-major by grid coordinate).
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    l: u32,
    sites: Vec<Site>,
    bonds: Vec<Bond>,
    positions_square: Vec<[f64; 2]>,
    positions_kagome: Vec<[f64; 2]>,
}

impl Lattice {
    pub fn new(l: u32) -> Result<Self, LatticeError> {
        if l == 0 {
            return Err(LatticeError::ZeroSize);
        }
        let span = 2 * l as i32;

        // Sites in row-major order: y outer, x inner, both-odd points skipped.
        let mut sites = Vec::with_capacity(Self::site_count(l));
        let mut index = vec![usize::MAX; ((span + 1) * (span + 1)) as usize];
        for gy in 0..=span {
            for gx in 0..=span {
                if gx % 2 == 1 && gy % 2 == 1 {
                    continue;
                }
                let role = match (gx % 2, gy % 2) {
                    (0, 0) => SiteRole::Corner,
                    (1, 0) => SiteRole::EdgeH,
                    (0, 1) => SiteRole::EdgeV,
                    _ => unreachable!(),
                };
                index[(gy * (span + 1) + gx) as usize] = sites.len();
                sites.push(Site { gx, gy, role });
            }
        }

        let at = |gx: i32, gy: i32| -> Option<usize> {
            if gx < 0 || gy < 0 || gx > span || gy > span {
                return None;
            }
            let idx = index[(gy * (span + 1) + gx) as usize];
            (idx != usize::MAX).then_some(idx)
        };

        // J bonds link grid neighbors at distance 1 (always corner-edge).
        // Iterating sites in index order and looking only at +x/+y keeps each
        // bond unique with i < j.
        let mut bonds = Vec::new();
        for (i, site) in sites.iter().enumerate() {
            if let Some(j) = at(site.gx + 1, site.gy) {
                bonds.push(Bond { i, j, class: BondClass::J });
            }
            if let Some(j) = at(site.gx, site.gy + 1) {
                bonds.push(Bond { i, j, class: BondClass::J });
            }
        }
        // J' bonds run along the anti-diagonal: each EdgeH site couples to the
        // EdgeV up-left of it and the EdgeV down-right of it. Bonds whose
        // partner falls outside the grid are dropped.
        for (i, site) in sites.iter().enumerate() {
            if site.role != SiteRole::EdgeH {
                continue;
            }
            for (dx, dy) in [(-1, 1), (1, -1)] {
                if let Some(j) = at(site.gx + dx, site.gy + dy) {
                    let (a, b) = if i < j { (i, j) } else { (j, i) };
                    bonds.push(Bond { i: a, j: b, class: BondClass::Jprime });
                }
            }
        }

        let positions_square: Vec<[f64; 2]> =
            sites.iter().map(|s| [s.gx as f64, s.gy as f64]).collect();
        let positions_kagome = sheared(&positions_square, 1.0);

        Ok(Lattice { l, sites, bonds, positions_square, positions_kagome })
    }

    /// Closed-form site count for the open-boundary construction.
    pub fn site_count(l: u32) -> usize {
        let l = l as usize;
        3 * l * l + 4 * l + 1
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    /// Positions in the square frame, nearest-neighbor spacing 1.
    pub fn positions_square(&self) -> &[[f64; 2]] {
        &self.positions_square
    }

    /// Positions in the fully sheared (kagome) frame.
    pub fn positions_kagome(&self) -> &[[f64; 2]] {
        &self.positions_kagome
    }

    /// Positions interpolated between the square frame (shear = 0) and the
    /// kagome frame (shear = 1).
    pub fn kagome_positions(&self, shear: f64) -> Result<Vec<[f64; 2]>, LatticeError> {
        if !(0.0..=1.0).contains(&shear) {
            return Err(LatticeError::ShearOutOfRange(shear));
        }
        Ok(sheared(&self.positions_square, shear))
    }

    /// (corner, edge-h, edge-v) counts.
    pub fn role_counts(&self) -> (usize, usize, usize) {
        let mut counts = (0, 0, 0);
        for s in &self.sites {
            match s.role {
                SiteRole::Corner => counts.0 += 1,
                SiteRole::EdgeH => counts.1 += 1,
                SiteRole::EdgeV => counts.2 += 1,
            }
        }
        counts
    }
}

fn sheared(square: &[[f64; 2]], shear: f64) -> Vec<[f64; 2]> {
    let y_scale = (1.0 - shear) + shear * SHEAR_Y_SCALE;
    square
        .iter()
        .map(|&[x, y]| [x + shear * y * 0.5, y * y_scale])
        .collect()
}
