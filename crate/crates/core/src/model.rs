//! Classical Ising Hamiltonian on a coupling graph, plus 3-spin chain embedding.
//!
//! Sign convention: the energy is `sum_bonds J_ij s_i s_j + sum_i h_i s_i`
//! with s_i = +-1. Positive couplings are antiferromagnetic (aligned
//! neighbors are penalized) and positive fields favor s = -1.

use thiserror::Error;

use crate::lattice::{BondClass, Lattice, SiteRole};

/// Ferromagnetic coupling binding the three spins of a chain.
pub const DEFAULT_CHAIN_COUPLING: f64 = -2.0;

/// Spins per chain in the embedded model.
pub const CHAIN_LEN: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("configuration has {got} spins, model has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("site index {index} out of range for {len} spins")]
    SiteOutOfRange { index: usize, len: usize },
    #[error("spin values must be +1 or -1")]
    BadSpinValue,
    #[error("bond ({i}, {j}) references a spin outside 0..{len}")]
    BadBond { i: usize, j: usize, len: usize },
    #[error("coupling J must be positive, got {0}")]
    NonPositiveJ(f64),
    #[error("coupling J' must be nonnegative, got {0}")]
    NegativeJprime(f64),
    #[error("coupling or field is not finite")]
    NotFinite,
}

/// A classical spin state: one value in {-1, +1} per site.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfig(Vec<i8>);

impl SpinConfig {
    pub fn from_spins(spins: Vec<i8>) -> Result<Self, ModelError> {
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(ModelError::BadSpinValue);
        }
        Ok(SpinConfig(spins))
    }

    pub fn uniform(n: usize, value: i8) -> Self {
        assert!(value == 1 || value == -1);
        SpinConfig(vec![value; n])
    }

    /// Staggered arrangement on a Lieb lattice: corners +1, edge sites -1.
    pub fn neel(lat: &Lattice) -> Self {
        SpinConfig(
            lat.sites()
                .iter()
                .map(|s| if s.role == SiteRole::Corner { 1 } else { -1 })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut c = self.clone();
        c.flip(i);
        c
    }

    /// Global spin reversal.
    pub fn negated(&self) -> Self {
        SpinConfig(self.0.iter().map(|s| -s).collect())
    }

    /// Integer sum of spins; magnetization is this over the site count.
    pub fn spin_sum(&self) -> i64 {
        self.0.iter().map(|&s| s as i64).sum()
    }

    pub(crate) fn from_raw(spins: Vec<i8>) -> Self {
        debug_assert!(spins.iter().all(|&s| s == 1 || s == -1));
        SpinConfig(spins)
    }
}

/// Parameters echoed when a model was built from a Lieb lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    pub l: u32,
    pub j: f64,
    pub jprime: f64,
    pub h: f64,
}

/// Ising model over an explicit bond list with per-site fields.
///
/// Immutable once built; `energy` and `local_field` are pure and safe to call
/// from any number of threads.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinModel {
    num_spins: usize,
    bonds: Vec<(u32, u32, f64)>,
    fields: Vec<f64>,
    // CSR adjacency, derived from the bond list.
    adj_offsets: Vec<u32>,
    adj_sites: Vec<u32>,
    adj_couplings: Vec<f64>,
    lattice_params: Option<LatticeParams>,
}

impl SpinModel {
    /// Generic constructor from an explicit bond list.
    pub fn from_bonds(
        num_spins: usize,
        bonds: Vec<(usize, usize, f64)>,
        fields: Vec<f64>,
    ) -> Result<Self, ModelError> {
        if fields.len() != num_spins {
            return Err(ModelError::LengthMismatch { expected: num_spins, got: fields.len() });
        }
        if fields.iter().any(|h| !h.is_finite()) {
            return Err(ModelError::NotFinite);
        }
        for &(i, j, c) in &bonds {
            if i >= num_spins || j >= num_spins || i == j {
                return Err(ModelError::BadBond { i, j, len: num_spins });
            }
            if !c.is_finite() {
                return Err(ModelError::NotFinite);
            }
        }
        let bonds: Vec<(u32, u32, f64)> =
            bonds.into_iter().map(|(i, j, c)| (i as u32, j as u32, c)).collect();

        let mut degree = vec![0u32; num_spins];
        for &(i, j, _) in &bonds {
            degree[i as usize] += 1;
            degree[j as usize] += 1;
        }
        let mut adj_offsets = vec![0u32; num_spins + 1];
        for i in 0..num_spins {
            adj_offsets[i + 1] = adj_offsets[i] + degree[i];
        }
        let total = adj_offsets[num_spins] as usize;
        let mut adj_sites = vec![0u32; total];
        let mut adj_couplings = vec![0.0; total];
        let mut cursor: Vec<u32> = adj_offsets[..num_spins].to_vec();
        for &(i, j, c) in &bonds {
            let ci = cursor[i as usize] as usize;
            adj_sites[ci] = j;
            adj_couplings[ci] = c;
            cursor[i as usize] += 1;
            let cj = cursor[j as usize] as usize;
            adj_sites[cj] = i;
            adj_couplings[cj] = c;
            cursor[j as usize] += 1;
        }

        Ok(SpinModel {
            num_spins,
            bonds,
            fields,
            adj_offsets,
            adj_sites,
            adj_couplings,
            lattice_params: None,
        })
    }

    /// Bind couplings J (corner-edge bonds), J' (anti-diagonal bonds) and a
    /// uniform field h to a lattice.
    pub fn from_lattice(lat: &Lattice, j: f64, jprime: f64, h: f64) -> Result<Self, ModelError> {
        if !j.is_finite() || !jprime.is_finite() || !h.is_finite() {
            return Err(ModelError::NotFinite);
        }
        if j <= 0.0 {
            return Err(ModelError::NonPositiveJ(j));
        }
        if jprime < 0.0 {
            return Err(ModelError::NegativeJprime(jprime));
        }
        let bonds = lat
            .bonds()
            .iter()
            .map(|b| {
                let c = match b.class {
                    BondClass::J => j,
                    BondClass::Jprime => jprime,
                };
                (b.i, b.j, c)
            })
            .collect();
        let mut model = Self::from_bonds(lat.num_sites(), bonds, vec![h; lat.num_sites()])?;
        model.lattice_params = Some(LatticeParams { l: lat.l(), j, jprime, h });
        Ok(model)
    }

    /// Three spins, two J bonds sharing spin 0 and one J' bond closing the
    /// triangle. The smallest frustrated unit of the kagome limit.
    pub fn triangle(j: f64, jprime: f64, h: f64) -> Self {
        Self::from_bonds(3, vec![(0, 1, j), (0, 2, j), (1, 2, jprime)], vec![h; 3])
            .expect("triangle couplings are valid")
    }

    /// Replace the field on one site (used for local symmetry-breaking probes).
    pub fn set_field(&mut self, i: usize, h: f64) -> Result<(), ModelError> {
        if i >= self.num_spins {
            return Err(ModelError::SiteOutOfRange { index: i, len: self.num_spins });
        }
        if !h.is_finite() {
            return Err(ModelError::NotFinite);
        }
        self.fields[i] = h;
        Ok(())
    }

    pub fn num_spins(&self) -> usize {
        self.num_spins
    }

    pub fn bonds(&self) -> &[(u32, u32, f64)] {
        &self.bonds
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn lattice_params(&self) -> Option<LatticeParams> {
        self.lattice_params
    }

    /// Total energy: bond sum plus field sum.
    pub fn energy(&self, config: &SpinConfig) -> Result<f64, ModelError> {
        if config.len() != self.num_spins {
            return Err(ModelError::LengthMismatch { expected: self.num_spins, got: config.len() });
        }
        let s = config.spins();
        let mut e = 0.0;
        for &(i, j, c) in &self.bonds {
            e += c * (s[i as usize] as f64) * (s[j as usize] as f64);
        }
        for (hi, &si) in self.fields.iter().zip(s) {
            e += hi * si as f64;
        }
        Ok(e)
    }

    /// `h_i + sum_j J_ij s_j`. Flipping spin i changes the total energy by
    /// exactly `-2 s_i * local_field(i)`.
    pub fn local_field(&self, config: &SpinConfig, i: usize) -> Result<f64, ModelError> {
        if config.len() != self.num_spins {
            return Err(ModelError::LengthMismatch { expected: self.num_spins, got: config.len() });
        }
        if i >= self.num_spins {
            return Err(ModelError::SiteOutOfRange { index: i, len: self.num_spins });
        }
        Ok(self.local_field_unchecked(config.spins(), i))
    }

    #[inline]
    pub(crate) fn local_field_unchecked(&self, spins: &[i8], i: usize) -> f64 {
        let lo = self.adj_offsets[i] as usize;
        let hi = self.adj_offsets[i + 1] as usize;
        let mut f = self.fields[i];
        for k in lo..hi {
            f += self.adj_couplings[k] * spins[self.adj_sites[k] as usize] as f64;
        }
        f
    }

    /// Expand every logical spin into a ferromagnetic 3-spin chain.
    ///
    /// Physical spins `3i, 3i+1, 3i+2` realize logical spin `i`; the chain is
    /// the path `3i - 3i+1 - 3i+2` with coupling `chain_coupling`. Every
    /// logical bond is carried by the lowest-index spin of each chain, and the
    /// logical field is split equally across the three chain members.
    pub fn embed(&self, chain_coupling: f64) -> (SpinModel, ChainEmbedding) {
        let n = self.num_spins;
        let mut bonds = Vec::with_capacity(2 * n + self.bonds.len());
        for i in 0..n {
            bonds.push((3 * i, 3 * i + 1, chain_coupling));
            bonds.push((3 * i + 1, 3 * i + 2, chain_coupling));
        }
        for &(i, j, c) in &self.bonds {
            bonds.push((3 * i as usize, 3 * j as usize, c));
        }
        let mut fields = Vec::with_capacity(3 * n);
        for &h in &self.fields {
            let split = h / CHAIN_LEN as f64;
            fields.extend_from_slice(&[split, split, split]);
        }
        let physical = SpinModel::from_bonds(3 * n, bonds, fields)
            .expect("embedded model construction is internally consistent");
        (physical, ChainEmbedding { num_logical: n, chain_coupling })
    }
}

/// Bookkeeping for the 3-spin chain expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainEmbedding {
    num_logical: usize,
    chain_coupling: f64,
}

impl ChainEmbedding {
    pub fn num_logical(&self) -> usize {
        self.num_logical
    }

    pub fn num_physical(&self) -> usize {
        CHAIN_LEN * self.num_logical
    }

    pub fn chain_coupling(&self) -> f64 {
        self.chain_coupling
    }

    /// Copy a logical configuration onto aligned chains.
    pub fn expand(&self, logical: &SpinConfig) -> Result<SpinConfig, ModelError> {
        if logical.len() != self.num_logical {
            return Err(ModelError::LengthMismatch {
                expected: self.num_logical,
                got: logical.len(),
            });
        }
        let mut spins = Vec::with_capacity(self.num_physical());
        for &s in logical.spins() {
            spins.extend_from_slice(&[s, s, s]);
        }
        Ok(SpinConfig::from_raw(spins))
    }

    /// Majority-vote each chain back to one logical spin. Chains of length 3
    /// cannot tie. Returns the decoded configuration and the number of chains
    /// whose spins were not unanimous.
    pub fn decode(&self, physical: &SpinConfig) -> Result<(SpinConfig, u32), ModelError> {
        if physical.len() != self.num_physical() {
            return Err(ModelError::LengthMismatch {
                expected: self.num_physical(),
                got: physical.len(),
            });
        }
        let spins = physical.spins();
        let mut logical = Vec::with_capacity(self.num_logical);
        let mut breaks = 0u32;
        for chain in spins.chunks_exact(CHAIN_LEN) {
            let sum: i32 = chain.iter().map(|&s| s as i32).sum();
            logical.push(if sum > 0 { 1 } else { -1 });
            if sum.unsigned_abs() as usize != CHAIN_LEN {
                breaks += 1;
            }
        }
        Ok((SpinConfig::from_raw(logical), breaks))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn triangle_states() -> Vec<SpinConfig> {
        (0..8u8)
            .map(|bits| {
                SpinConfig::from_spins(
                    (0..3).map(|k| if bits >> k & 1 == 1 { 1 } else { -1 }).collect(),
                )
                .unwrap()
            })
            .collect()
    }

    #[test]
    fn triangle_energy_and_minimum() {
        // Independent 8-state enumeration: minimum is -0.6, six states reach it.
        let model = SpinModel::triangle(0.6, 0.6, 0.0);
        let config = SpinConfig::from_spins(vec![1, 1, -1]).unwrap();
        assert!((model.energy(&config).unwrap() - (-0.6)).abs() < 1e-12);
        let energies: Vec<f64> =
            triangle_states().iter().map(|c| model.energy(c).unwrap()).collect();
        let min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min - (-0.6)).abs() < 1e-12);
        assert_eq!(energies.iter().filter(|&&e| (e - min).abs() < 1e-12).count(), 6);
    }

    #[test]
    fn ideal_lieb_state_satisfies_every_j_bond() {
        let lat = Lattice::new(1).unwrap();
        let model = SpinModel::from_lattice(&lat, 0.6, 0.0, 0.0).unwrap();
        let neel = SpinConfig::neel(&lat);
        assert!((model.energy(&neel).unwrap() - (-4.8)).abs() < 1e-12);
    }

    #[test]
    fn energy_rejects_length_mismatch() {
        let model = SpinModel::triangle(0.6, 0.6, 0.0);
        let short = SpinConfig::from_spins(vec![1, -1]).unwrap();
        assert!(matches!(
            model.energy(&short),
            Err(ModelError::LengthMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn from_lattice_validates_couplings() {
        let lat = Lattice::new(1).unwrap();
        assert!(SpinModel::from_lattice(&lat, 0.0, 0.1, 0.0).is_err());
        assert!(SpinModel::from_lattice(&lat, 0.6, -0.1, 0.0).is_err());
        assert!(SpinModel::from_lattice(&lat, 0.6, 0.1, f64::NAN).is_err());
    }

    #[test]
    fn local_field_isolated_site_is_the_field() {
        let model = SpinModel::from_bonds(1, vec![], vec![0.3]).unwrap();
        let c = SpinConfig::from_spins(vec![1]).unwrap();
        assert!((model.local_field(&c, 0).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn local_field_triangle_site_zero() {
        let model = SpinModel::triangle(0.6, 0.6, 0.0);
        let c = SpinConfig::from_spins(vec![1, 1, -1]).unwrap();
        assert!(model.local_field(&c, 0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn local_field_rejects_bad_index() {
        let model = SpinModel::triangle(0.6, 0.6, 0.0);
        let c = SpinConfig::from_spins(vec![1, 1, -1]).unwrap();
        assert!(matches!(
            model.local_field(&c, 3),
            Err(ModelError::SiteOutOfRange { index: 3, len: 3 })
        ));
    }

    #[test]
    fn flip_consistency_random_configs() {
        // energy(flip) - energy == -2 s_i local_field(i) for 1000 random pairs.
        let lat = Lattice::new(2).unwrap();
        let model = SpinModel::from_lattice(&lat, 0.7, 0.4, 0.15).unwrap();
        let mut rng = crate::rng::read_rng(99, 0);
        for _ in 0..1000 {
            let spins: Vec<i8> =
                (0..model.num_spins()).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
            let config = SpinConfig::from_spins(spins).unwrap();
            let i = rng.gen_range(0..model.num_spins());
            let lhs = model.energy(&config.flipped(i)).unwrap() - model.energy(&config).unwrap();
            let rhs = -2.0 * config.spins()[i] as f64 * model.local_field(&config, i).unwrap();
            assert!((lhs - rhs).abs() < 1e-12, "site {i}: {lhs} vs {rhs}");
        }
    }

    proptest! {
        #[test]
        fn global_flip_symmetry_at_zero_field(bits in proptest::collection::vec(any::<bool>(), 21)) {
            let lat = Lattice::new(2).unwrap();
            let model = SpinModel::from_lattice(&lat, 0.6, 0.9, 0.0).unwrap();
            let spins: Vec<i8> = bits.iter().map(|&b| if b { 1 } else { -1 }).collect();
            let c = SpinConfig::from_spins(spins).unwrap();
            let e = model.energy(&c).unwrap();
            let e_neg = model.energy(&c.negated()).unwrap();
            prop_assert!((e - e_neg).abs() < 1e-12);
        }
    }

    #[test]
    fn embed_counts() {
        let lat = Lattice::new(1).unwrap();
        let model = SpinModel::from_lattice(&lat, 0.6, 0.3, 0.0).unwrap();
        let (physical, emb) = model.embed(DEFAULT_CHAIN_COUPLING);
        assert_eq!(physical.num_spins(), 24);
        assert_eq!(emb.num_physical(), 24);
        let intra = physical
            .bonds()
            .iter()
            .filter(|&&(_, _, c)| c == DEFAULT_CHAIN_COUPLING)
            .count();
        assert_eq!(intra, 16);
    }

    #[test]
    fn embedded_triangle_ground_energy() {
        // 2^9 enumeration of the physical triangle model: the minimum sits at
        // the logical ground energy plus six satisfied chain bonds.
        let model = SpinModel::triangle(0.6, 0.6, 0.0);
        let (physical, _) = model.embed(DEFAULT_CHAIN_COUPLING);
        let mut min = f64::INFINITY;
        for bits in 0..1u32 << 9 {
            let spins: Vec<i8> =
                (0..9).map(|k| if bits >> k & 1 == 1 { 1 } else { -1 }).collect();
            let e = physical.energy(&SpinConfig::from_spins(spins).unwrap()).unwrap();
            min = min.min(e);
        }
        assert!((min - (-12.6)).abs() < 1e-12);
    }

    #[test]
    fn aligned_physical_energy_is_logical_plus_chain_constant() {
        let lat = Lattice::new(1).unwrap();
        let model = SpinModel::from_lattice(&lat, 0.6, 0.4, 0.2).unwrap();
        let (physical, emb) = model.embed(DEFAULT_CHAIN_COUPLING);
        let chain_constant = 2.0 * model.num_spins() as f64 * DEFAULT_CHAIN_COUPLING;
        let mut rng = crate::rng::read_rng(3, 0);
        for _ in 0..50 {
            let spins: Vec<i8> =
                (0..model.num_spins()).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
            let logical = SpinConfig::from_spins(spins).unwrap();
            let expanded = emb.expand(&logical).unwrap();
            let lhs = physical.energy(&expanded).unwrap();
            let rhs = model.energy(&logical).unwrap() + chain_constant;
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn decode_majority_votes_and_counts_breaks() {
        let emb = ChainEmbedding { num_logical: 2, chain_coupling: -2.0 };
        let physical = SpinConfig::from_spins(vec![1, 1, 1, 1, -1, 1]).unwrap();
        let (logical, breaks) = emb.decode(&physical).unwrap();
        assert_eq!(logical.spins(), &[1, 1]);
        assert_eq!(breaks, 1);
    }

    #[test]
    fn expand_then_decode_is_identity_with_zero_breaks() {
        let lat = Lattice::new(1).unwrap();
        let model = SpinModel::from_lattice(&lat, 0.6, 0.3, 0.0).unwrap();
        let (_, emb) = model.embed(DEFAULT_CHAIN_COUPLING);
        let logical = SpinConfig::neel(&lat);
        let (decoded, breaks) = emb.decode(&emb.expand(&logical).unwrap()).unwrap();
        assert_eq!(decoded, logical);
        assert_eq!(breaks, 0);
    }

    #[test]
    fn disconnected_duplicate_doubles_ground_energy() {
        // Extensivity check at L=1 via the exact enumerator.
        let lat = Lattice::new(1).unwrap();
        let single = SpinModel::from_lattice(&lat, 0.6, 0.3, 0.0).unwrap();
        let n = single.num_spins();
        let mut bonds: Vec<(usize, usize, f64)> = single
            .bonds()
            .iter()
            .map(|&(i, j, c)| (i as usize, j as usize, c))
            .collect();
        let copy: Vec<(usize, usize, f64)> =
            bonds.iter().map(|&(i, j, c)| (i + n, j + n, c)).collect();
        bonds.extend(copy);
        let double = SpinModel::from_bonds(2 * n, bonds, vec![0.0; 2 * n]).unwrap();
        let g1 = crate::samplers::exact_ground(&single).unwrap();
        let g2 = crate::samplers::exact_ground(&double).unwrap();
        assert!((g2.energy - 2.0 * g1.energy).abs() < 1e-9);
    }
}
