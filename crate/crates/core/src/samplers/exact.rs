//! Exhaustive ground-state enumeration, the oracle the stochastic engines are
//! checked against at small size.

use crate::model::{SpinConfig, SpinModel};

use super::SamplerError;

/// Enumeration is capped at 2^26 states.
pub const MAX_EXACT_SITES: usize = 26;

/// Two states are counted as degenerate when their energies differ by less
/// than this. Energies are recomputed with a fixed summation order before a
/// state enters the ground manifold, so the tolerance only has to absorb
/// reordering noise, not drift.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactGround {
    pub energy: f64,
    pub configs: Vec<SpinConfig>,
    pub degeneracy: usize,
}

/// Scan all 2^N configurations; return the exact minimum, every minimizing
/// configuration (in enumeration order), and their count.
///
/// The scan walks a Gray code so each step flips a single spin and updates
/// the running energy in O(degree).
pub fn exact_ground(model: &SpinModel) -> Result<ExactGround, SamplerError> {
    let n = model.num_spins();
    if n == 0 || n > MAX_EXACT_SITES {
        return Err(SamplerError::TooManySites { sites: n, max: MAX_EXACT_SITES });
    }

    // Pass 1: locate the minimum.
    let mut best = f64::INFINITY;
    walk_gray(model, |energy, _| {
        if energy < best {
            best = energy;
        }
    });

    // Pass 2: collect states within tolerance, re-evaluating candidates from
    // scratch so incremental rounding cannot admit or drop a state.
    let mut configs = Vec::new();
    let mut exact_min = f64::INFINITY;
    walk_gray(model, |energy, spins| {
        if energy > best + 2.0 * DEGENERACY_TOL {
            return;
        }
        let config = SpinConfig::from_raw(spins.to_vec());
        let exact = model.energy(&config).expect("config length matches model");
        if exact < exact_min - DEGENERACY_TOL {
            exact_min = exact;
            configs.clear();
            configs.push(config);
        } else if (exact - exact_min).abs() <= DEGENERACY_TOL {
            configs.push(config);
        }
    });

    let degeneracy = configs.len();
    Ok(ExactGround { energy: exact_min, configs, degeneracy })
}

/// Visit all 2^N states in Gray-code order, passing the incrementally
/// maintained energy and the current spins to the callback.
fn walk_gray<F: FnMut(f64, &[i8])>(model: &SpinModel, mut visit: F) {
    let n = model.num_spins();
    let mut spins = vec![-1i8; n];
    let start = SpinConfig::from_raw(spins.clone());
    let mut energy = model.energy(&start).expect("config length matches model");
    visit(energy, &spins);
    for step in 1u64..1u64 << n {
        let i = step.trailing_zeros() as usize;
        energy += -2.0 * spins[i] as f64 * model.local_field_unchecked(&spins, i);
        spins[i] = -spins[i];
        visit(energy, &spins);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_ground_manifold() {
        let model = SpinModel::triangle(0.6, 0.6, 0.0);
        let ground = exact_ground(&model).unwrap();
        assert!((ground.energy - (-0.6)).abs() < 1e-12);
        assert_eq!(ground.degeneracy, 6);
        assert_eq!(ground.configs.len(), 6);
        // The two uniform states are the only ones excluded.
        for c in &ground.configs {
            assert_ne!(c.spins(), &[1, 1, 1]);
            assert_ne!(c.spins(), &[-1, -1, -1]);
        }
    }

    #[test]
    fn lieb_l1_has_a_neel_pair() {
        let lat = crate::lattice::Lattice::new(1).unwrap();
        let model = SpinModel::from_lattice(&lat, 0.6, 0.0, 0.0).unwrap();
        let ground = exact_ground(&model).unwrap();
        assert!((ground.energy - (-4.8)).abs() < 1e-12);
        assert_eq!(ground.degeneracy, 2);
        let neel = SpinConfig::neel(&lat);
        assert!(ground.configs.contains(&neel));
        assert!(ground.configs.contains(&neel.negated()));
    }

    #[test]
    fn single_spin_in_a_field() {
        let model = SpinModel::from_bonds(1, vec![], vec![0.5]).unwrap();
        let ground = exact_ground(&model).unwrap();
        assert!((ground.energy - (-0.5)).abs() < 1e-15);
        assert_eq!(ground.degeneracy, 1);
        assert_eq!(ground.configs[0].spins(), &[-1]);
    }

    #[test]
    fn size_cap_is_enforced() {
        let model = SpinModel::from_bonds(27, vec![], vec![0.0; 27]).unwrap();
        assert!(matches!(
            exact_ground(&model),
            Err(SamplerError::TooManySites { sites: 27, max: 26 })
        ));
    }

    #[test]
    fn matches_plain_scan_on_random_model() {
        // Cross-check the Gray-code walk against a direct 2^N scan.
        let mut rng = crate::rng::read_rng(17, 0);
        use rand::Rng;
        let n = 10;
        let mut bonds = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen::<f64>() < 0.4 {
                    bonds.push((i, j, rng.gen_range(-1.0..1.0)));
                }
            }
        }
        let fields: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let model = SpinModel::from_bonds(n, bonds, fields).unwrap();
        let mut min = f64::INFINITY;
        for bits in 0..1u32 << n {
            let spins: Vec<i8> =
                (0..n).map(|k| if bits >> k & 1 == 1 { 1 } else { -1 }).collect();
            min = min.min(model.energy(&SpinConfig::from_spins(spins).unwrap()).unwrap());
        }
        let ground = exact_ground(&model).unwrap();
        assert!((ground.energy - min).abs() < 1e-9);
    }
}
