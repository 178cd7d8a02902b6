//! File output: CSV curves, 16-bit PGM heatmaps, sample dumps, the lattice
//! text format, and a sha-256 manifest.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::RunConfig;
use crate::model::{LatticeParams, ModelError, SpinConfig, SpinModel};
use crate::lattice::{Lattice, LatticeError};
use crate::observables::SqGrid;
use crate::samplers::{EngineKind, Sample, SampleMeta, SampleSet};
use crate::sweep::SweepResult;

pub const PGM_MAXVAL: u16 = 65535;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write `{path}`: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("cannot read `{path}`: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("samples dump line {line}: {reason}")]
    BadDump { line: usize, reason: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `jprime,h,mean_abs_m,stderr,reads` rows in plan order.
pub fn magnetization_csv(result: &SweepResult) -> String {
    let mut out = String::from("jprime,h,mean_abs_m,stderr,reads\n");
    for p in &result.points {
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{}",
            p.jprime, p.h, p.mag.mean_abs_m, p.mag.std_err, p.mag.reads
        );
    }
    out
}

/// Binary 16-bit NetPBM (P5, big-endian, maxval 65535), row-major over the
/// raster. Intensities are scaled linearly so the grid maximum maps to the
/// maxval; the scale is recorded in the sidecar produced by [`sq_meta`].
pub fn pgm_bytes(grid: &SqGrid) -> Vec<u8> {
    let res = grid.resolution;
    let mut bytes = format!("P5\n{res} {res}\n{PGM_MAXVAL}\n").into_bytes();
    let max = grid.max_value();
    for &v in &grid.values {
        let pixel = if max > 0.0 {
            ((v / max) * PGM_MAXVAL as f64).round() as u16
        } else {
            0
        };
        bytes.extend_from_slice(&pixel.to_be_bytes());
    }
    bytes
}

/// Sidecar describing the linear intensity mapping of a PGM map.
pub fn sq_meta(grid: &SqGrid) -> String {
    format!(
        "max_intensity {}\nzone {}\nresolution {}\nq_start {}\nq_step {}\nnum_sites {}\nreads {}\n",
        grid.max_value(),
        grid.zone,
        grid.resolution,
        grid.q_start,
        grid.q_step,
        grid.num_sites,
        grid.reads
    )
}

/// Lattice dump: `index x y role` per site, then `i j class` per bond.
pub fn lattice_text(lat: &Lattice) -> String {
    let mut out = String::new();
    for (i, s) in lat.sites().iter().enumerate() {
        let _ = writeln!(out, "{} {} {} {}", i, s.gx, s.gy, s.role);
    }
    for b in lat.bonds() {
        let _ = writeln!(out, "{} {} {}", b.i, b.j, b.class);
    }
    out
}

/// Sample dump: `#` header lines echoing the run parameters, then one
/// +/- string per read.
pub fn samples_text(set: &SampleSet) -> String {
    let mut out = String::from("# liebkag samples v1\n");
    if let Some(p) = set.meta.lattice {
        let _ = writeln!(out, "# l {}", p.l);
        let _ = writeln!(out, "# j {}", p.j);
        let _ = writeln!(out, "# jprime {}", p.jprime);
        let _ = writeln!(out, "# h {}", p.h);
    }
    let _ = writeln!(out, "# engine {}", set.meta.engine);
    let _ = writeln!(out, "# seed {}", set.meta.seed);
    let _ = writeln!(out, "# reads {}", set.len());
    for s in &set.samples {
        let line: String =
            s.config.spins().iter().map(|&v| if v > 0 { '+' } else { '-' }).collect();
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Rebuild a sample set (with energies recomputed) from a dump produced by
/// [`samples_text`]. Returns the lattice it was measured on.
pub fn parse_samples(text: &str) -> Result<(Lattice, SpinModel, SampleSet), OutputError> {
    let mut l: Option<u32> = None;
    let mut j: Option<f64> = None;
    let mut jprime: Option<f64> = None;
    let mut h: Option<f64> = None;
    let mut engine = EngineKind::Anneal;
    let mut seed = 0u64;
    let mut configs: Vec<SpinConfig> = Vec::new();

    let header = |line: usize, reason: &str| OutputError::BadDump { line, reason: reason.into() };

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut parts = rest.split_whitespace();
            let (key, value) = (parts.next().unwrap_or(""), parts.next().unwrap_or(""));
            macro_rules! parsed {
                () => {
                    value
                        .parse()
                        .map_err(|_| header(lineno, &format!("bad value for `{key}`")))?
                };
            }
            match key {
                "l" => l = Some(parsed!()),
                "j" => j = Some(parsed!()),
                "jprime" => jprime = Some(parsed!()),
                "h" => h = Some(parsed!()),
                "seed" => seed = parsed!(),
                "engine" => {
                    engine = match value {
                        "exact" => EngineKind::Exact,
                        "sa" => EngineKind::Anneal,
                        "sqa" => EngineKind::QuantumAnneal,
                        _ => return Err(header(lineno, "unknown engine")),
                    }
                }
                _ => {} // informative headers are allowed
            }
            continue;
        }
        let spins: Result<Vec<i8>, _> = line
            .chars()
            .map(|c| match c {
                '+' => Ok(1i8),
                '-' => Ok(-1i8),
                _ => Err(header(lineno, "spin characters must be + or -")),
            })
            .collect();
        configs.push(SpinConfig::from_spins(spins?).expect("parsed spins are +-1"));
    }

    let l = l.ok_or_else(|| header(0, "missing `# l` header"))?;
    let j = j.ok_or_else(|| header(0, "missing `# j` header"))?;
    let jprime = jprime.ok_or_else(|| header(0, "missing `# jprime` header"))?;
    let h = h.ok_or_else(|| header(0, "missing `# h` header"))?;
    if configs.is_empty() {
        return Err(header(0, "dump contains no reads"));
    }

    let lat = Lattice::new(l)?;
    let model = SpinModel::from_lattice(&lat, j, jprime, h)?;
    let samples: Result<Vec<Sample>, OutputError> = configs
        .into_iter()
        .enumerate()
        .map(|(k, config)| {
            if config.len() != lat.num_sites() {
                return Err(header(0, &format!(
                    "read {} has {} spins, lattice has {}",
                    k + 1,
                    config.len(),
                    lat.num_sites()
                )));
            }
            let energy = model.energy(&config)?;
            Ok(Sample { config, energy, seed: k as u64, chain_breaks: None })
        })
        .collect();
    let samples = samples?;
    let meta = SampleMeta {
        engine,
        reads: samples.len(),
        seed,
        lattice: Some(LatticeParams { l, j, jprime, h }),
        embedded: false,
        schedule: String::new(),
    };
    Ok((lat, model, SampleSet { samples, meta }))
}

/// Compact parameter rendering for file names (`0.35` not `0.35000`).
pub fn param_label(v: f64) -> String {
    format!("{}", crate::sweep::round10(v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    /// (file name, sha-256 hex), sorted by name.
    pub entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, hash) in &self.entries {
            let _ = writeln!(out, "{hash}  {name}");
        }
        out
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), OutputError> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|source| OutputError::Write { path, source })
}

/// Write every requested artifact of a sweep and a manifest of their hashes.
///
/// Produces `magnetization.csv`, per-point `sq_<jprime>_<h>.pgm` maps with
/// `.meta` sidecars when the plan computed structure factors, per-point
/// `samples_<jprime>_<h>.txt` dumps when requested, and `manifest.txt`.
pub fn write_outputs(
    result: &SweepResult,
    config: &RunConfig,
    sample_dumps: &[(f64, f64, String)],
) -> Result<Manifest, OutputError> {
    let dir = &config.outdir;
    fs::create_dir_all(dir)
        .map_err(|source| OutputError::Write { path: dir.clone(), source })?;

    let mut entries: Vec<(String, String)> = Vec::new();
    let mut emit = |name: String, bytes: &[u8]| -> Result<(), OutputError> {
        write_file(dir, &name, bytes)?;
        entries.push((name, sha256_hex(bytes)));
        Ok(())
    };

    let csv = magnetization_csv(result);
    emit("magnetization.csv".to_string(), csv.as_bytes())?;

    for p in &result.points {
        if let Some(grid) = &p.sq {
            let stem = format!("sq_{}_{}", param_label(p.jprime), param_label(p.h));
            emit(format!("{stem}.pgm"), &pgm_bytes(grid))?;
            emit(format!("{stem}.meta"), sq_meta(grid).as_bytes())?;
        }
    }
    for (jprime, h, text) in sample_dumps {
        let name = format!("samples_{}_{}.txt", param_label(*jprime), param_label(*h));
        emit(name, text.as_bytes())?;
    }

    entries.sort();
    let manifest = Manifest { entries };
    write_file(dir, "manifest.txt", manifest.render().as_bytes())?;
    Ok(manifest)
}

/// Recompute hashes of the files listed in a manifest.
pub fn verify_manifest(dir: &Path, manifest: &Manifest) -> Result<bool, OutputError> {
    for (name, expected) in &manifest.entries {
        let path = dir.join(name);
        let bytes =
            fs::read(&path).map_err(|source| OutputError::Read { path, source })?;
        if sha256_hex(&bytes) != *expected {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{structure_factor, SqOptions, Zone};
    use crate::samplers::{sample, EngineSpec, SaParams, SamplerSpec};
    use crate::sweep::{run_sweep, SweepPlan};

    fn small_sweep() -> SweepResult {
        let plan = SweepPlan {
            l: 1,
            jprimes: vec![0.35, 0.6, 1.0],
            fields: vec![0.0],
            sampler: SamplerSpec {
                engine: EngineSpec::Anneal(SaParams { sweeps: 30, ..Default::default() }),
                reads: 20,
                seed: 2,
                embedding: None,
            },
            sq: None,
            ..Default::default()
        };
        run_sweep(&plan).unwrap()
    }

    #[test]
    fn csv_has_header_and_sorted_rows() {
        let result = small_sweep();
        let csv = magnetization_csv(&result);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "jprime,h,mean_abs_m,stderr,reads");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0.35,0,"));
        assert!(lines[2].starts_with("0.6,0,"));
        assert!(lines[3].starts_with("1,0,"));
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn pgm_layout_is_big_endian_16_bit() {
        let lat = Lattice::new(1).unwrap();
        let model = SpinModel::from_lattice(&lat, 0.6, 0.0, 0.0).unwrap();
        let spec = SamplerSpec {
            engine: EngineSpec::Exact,
            ..Default::default()
        };
        let set = sample(&model, &spec).unwrap();
        let grid =
            structure_factor(&set, &lat, &SqOptions { resolution: 8, ..Default::default() })
                .unwrap();
        let bytes = pgm_bytes(&grid);
        let header = b"P5\n8 8\n65535\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(bytes.len(), header.len() + 2 * 64);
        // The maximum intensity maps to the maxval.
        let payload = &bytes[header.len()..];
        let max_pixel = payload
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .max()
            .unwrap();
        assert_eq!(max_pixel, PGM_MAXVAL);
        let meta = sq_meta(&grid);
        assert!(meta.contains("max_intensity"));
        assert!(meta.contains("zone square"));
    }

    #[test]
    fn neel_pgm_peaks_at_the_pixel_nearest_pi_pi() {
        use crate::model::SpinConfig;
        use crate::samplers::{EngineKind, Sample, SampleMeta};
        let lat = Lattice::new(4).unwrap();
        let model = SpinModel::from_lattice(&lat, 0.6, 0.35, 0.0).unwrap();
        let neel = SpinConfig::neel(&lat);
        let energy = model.energy(&neel).unwrap();
        let set = crate::samplers::SampleSet {
            samples: vec![Sample { config: neel, energy, seed: 0, chain_breaks: None }],
            meta: SampleMeta {
                engine: EngineKind::Exact,
                reads: 1,
                seed: 0,
                lattice: model.lattice_params(),
                embedded: false,
                schedule: String::new(),
            },
        };
        let grid =
            structure_factor(&set, &lat, &SqOptions { resolution: 32, ..Default::default() })
                .unwrap();
        let bytes = pgm_bytes(&grid);
        let header_len = b"P5\n32 32\n65535\n".len();
        let pixels: Vec<u16> = bytes[header_len..]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect();
        let max_pixel = *pixels.iter().max().unwrap();
        let (ix, iy) = grid.nearest_index([std::f64::consts::PI, std::f64::consts::PI]);
        // The symmetric peaks at the other zone corners quantize to the same
        // pixel value, so compare values rather than the argmax index.
        assert_eq!(pixels[iy * 32 + ix], max_pixel);
        assert_eq!(max_pixel, PGM_MAXVAL);
    }

    #[test]
    fn all_zero_grid_maps_to_zero_pixels() {
        let grid = SqGrid {
            zone: Zone::Square,
            resolution: 8,
            q_start: 0.0,
            q_step: 1.0,
            values: vec![0.0; 64],
            num_sites: 1,
            reads: 1,
        };
        let bytes = pgm_bytes(&grid);
        assert!(bytes[b"P5\n8 8\n65535\n".len()..].iter().all(|&b| b == 0));
    }

    #[test]
    fn lattice_text_lists_sites_then_bonds() {
        let lat = Lattice::new(1).unwrap();
        let text = lattice_text(&lat);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 8 + 10);
        assert_eq!(lines[0], "0 0 0 corner");
        assert_eq!(lines[1], "1 1 0 edgeh");
        assert!(lines[8].split_whitespace().count() == 3);
        assert!(text.contains("jprime"));
    }

    #[test]
    fn samples_dump_round_trips() {
        let lat = Lattice::new(2).unwrap();
        let model = SpinModel::from_lattice(&lat, 0.6, 0.8, 0.1).unwrap();
        let spec = SamplerSpec {
            engine: EngineSpec::Anneal(SaParams { sweeps: 25, ..Default::default() }),
            reads: 15,
            seed: 9,
            embedding: None,
        };
        let set = sample(&model, &spec).unwrap();
        let text = samples_text(&set);
        let (lat2, _model2, set2) = parse_samples(&text).unwrap();
        assert_eq!(lat2, lat);
        assert_eq!(set2.len(), set.len());
        for (a, b) in set.samples.iter().zip(&set2.samples) {
            assert_eq!(a.config, b.config);
            assert_eq!(a.energy, b.energy);
        }
    }

    #[test]
    fn dump_parser_rejects_garbage() {
        assert!(parse_samples("# l 1\n# j 0.6\n# jprime 0\n# h 0\n+*-\n").is_err());
        assert!(parse_samples("+-+-\n").is_err()); // missing headers
        let err = parse_samples("# l 1\n# j 0.6\n# jprime 0\n# h 0\n++\n").unwrap_err();
        assert!(matches!(err, OutputError::BadDump { .. }));
    }

    #[test]
    fn manifest_hashes_verify_after_write() {
        let dir = tempfile::tempdir().unwrap();
        let result = small_sweep();
        let config =
            RunConfig { outdir: dir.path().to_path_buf(), ..Default::default() };
        let manifest = write_outputs(&result, &config, &[]).unwrap();
        assert!(verify_manifest(dir.path(), &manifest).unwrap());
        let rendered = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
        assert!(rendered.contains("magnetization.csv"));
        let line = rendered.lines().next().unwrap();
        assert_eq!(line.split("  ").count(), 2);
        assert_eq!(line.split("  ").next().unwrap().len(), 64);
    }

    #[test]
    fn reruns_are_byte_identical() {
        let result_a = small_sweep();
        let result_b = small_sweep();
        assert_eq!(magnetization_csv(&result_a), magnetization_csv(&result_b));
    }

    #[test]
    fn param_labels_are_compact() {
        assert_eq!(param_label(0.35), "0.35");
        assert_eq!(param_label(0.0), "0");
        assert_eq!(param_label(0.3 + 0.05 * 7.0), "0.65");
    }
}
