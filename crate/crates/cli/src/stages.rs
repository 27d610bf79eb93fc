//! Pipeline stages. Each stage hashes its parameters together with the
//! contents of its input artifacts and is skipped when the manifest already
//! records that key with unchanged outputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use kicked_top::analysis::{correlate, correlation_sweep, histogram, Histogram, SizeSamples};
use kicked_top::classical::SeedChoice;
use kicked_top::floquet::read_eigenvectors;
use kicked_top::otoc::required_times;
use kicked_top::{
    chaotic_mask, classify, husimi_sweep, kicked_top_spectrum, poincare_section, AnalyticForm, ChaoticMask,
    FloquetSpectrum, Label, OtocEngine, PhaseGrid, Spin,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::io::{num, read_json, write_csv, write_json, Table};
use crate::manifest::{hash_bytes, hash_file, RunManifest, StageRecord};

pub const STAGES: [&str; 6] = ["poincare", "mask", "spectrum", "chi", "otoc", "analyze"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representatives {
    pub regular: usize,
    pub mixed: usize,
    pub chaotic: usize,
}

impl Representatives {
    fn pick(chi: &[f64]) -> Self {
        let by = |f: &dyn Fn(f64) -> f64| {
            (0..chi.len())
                .min_by(|&a, &b| f(chi[a]).total_cmp(&f(chi[b])))
                .expect("non-empty spectrum")
        };
        Self {
            regular: by(&|c| c),
            mixed: by(&|c| c.abs()),
            chaotic: by(&|c| -c),
        }
    }

    pub fn states(&self) -> Vec<usize> {
        let mut v = Vec::with_capacity(3);
        for k in [self.regular, self.mixed, self.chaotic] {
            if !v.contains(&k) {
                v.push(k);
            }
        }
        v
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ChiSummary {
    representatives: Representatives,
    counts: BTreeMap<String, usize>,
    chaotic_sea: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpectrumMeta {
    #[serde(rename = "S")]
    spin: f64,
    dim: usize,
    observable: String,
    layout: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct MaskMeta {
    grid_n: usize,
    kicks: u64,
    chaotic_sea: bool,
    chaotic_fraction: f64,
    seed_exponent: f64,
    seed_point: Option<[f64; 2]>,
}

pub struct Pipeline {
    pub cfg: ExperimentConfig,
    pub dir: PathBuf,
    manifest: RunManifest,
}

impl Pipeline {
    /// Validates the config, prepares the output directory and echoes the
    /// resolved config into it.
    pub fn open(cfg: ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        cfg.warn_regime();
        let dir = cfg.output_dir.clone();
        std::fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
        write_json(&dir.join("config.json"), &cfg)?;
        let manifest = RunManifest::load_or_new(&dir, cfg.clone())?;
        Ok(Self { cfg, dir, manifest })
    }

    pub fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }

    fn require(&self, file: &str, producer: &'static str) -> Result<PathBuf> {
        let p = self.path(file);
        if p.exists() {
            Ok(p)
        } else {
            Err(CliError::MissingArtifact {
                file: file.into(),
                dir: self.dir.clone(),
                producer,
            })
        }
    }

    /// Runs `body` unless the cached outputs match. Returns whether it ran.
    fn stage(
        &mut self,
        name: &'static str,
        params: serde_json::Value,
        inputs: &[(&str, &'static str)],
        body: impl FnOnce(&Self) -> Result<Vec<String>>,
    ) -> Result<bool> {
        let mut input_hashes = BTreeMap::new();
        for &(file, producer) in inputs {
            let p = self.require(file, producer)?;
            input_hashes.insert(file.to_string(), hash_file(&p)?);
        }
        let key = hash_bytes(
            serde_json::to_string(&json!({
                "stage": name,
                "version": env!("CARGO_PKG_VERSION"),
                "params": params,
                "inputs": input_hashes,
            }))?
            .as_bytes(),
        );
        if self.manifest.is_fresh(name, &key, &self.dir) {
            log::info!("{name}: cached");
            return Ok(false);
        }
        log::info!("{name}: running");
        let started = Instant::now();
        let result = body(self);
        let wall_seconds = started.elapsed().as_secs_f64();
        let record = match &result {
            Ok(outputs) => {
                let mut hashes = BTreeMap::new();
                for f in outputs {
                    hashes.insert(f.clone(), hash_file(&self.path(f))?);
                }
                StageRecord {
                    key,
                    complete: true,
                    outputs: hashes,
                    wall_seconds,
                    error: None,
                }
            }
            Err(e) => StageRecord {
                key,
                complete: false,
                outputs: BTreeMap::new(),
                wall_seconds,
                error: Some(e.to_string()),
            },
        };
        self.manifest.stages.insert(name.into(), record);
        self.manifest.complete = STAGES
            .iter()
            .all(|s| self.manifest.stages.get(*s).is_some_and(|r| r.complete));
        self.manifest.save(&self.dir)?;
        match result {
            Ok(_) => {
                log::info!("{name}: done in {wall_seconds:.2} s");
                Ok(true)
            }
            Err(e) => Err(CliError::Stage {
                stage: name,
                source: Box::new(e),
            }),
        }
    }

    pub fn run_all(&mut self) -> Result<()> {
        self.poincare()?;
        self.mask()?;
        self.spectrum()?;
        self.chi()?;
        self.otoc()?;
        self.analyze()?;
        Ok(())
    }

    pub fn poincare(&mut self) -> Result<bool> {
        let c = &self.cfg;
        let params = json!({
            "alpha": c.alpha, "kappa": c.kappa, "trajectories": c.poincare_trajectories,
            "kicks": c.poincare_kicks, "seed": c.seed,
        });
        self.stage("poincare", params, &[], |p| {
            let c = &p.cfg;
            let section = poincare_section(c.alpha, c.kappa, c.poincare_trajectories, c.poincare_kicks, c.seed)?;
            let per = c.poincare_kicks + 1;
            write_csv(
                &p.path("poincare.csv"),
                &["trajectory", "kick", "phi", "cos_theta"],
                section
                    .points
                    .iter()
                    .enumerate()
                    .map(|(i, &(phi, ct))| vec![(i / per).to_string(), (i % per).to_string(), num(phi), num(ct)]),
            )?;
            Ok(vec!["poincare.csv".into()])
        })
    }

    pub fn mask(&mut self) -> Result<bool> {
        let c = &self.cfg;
        let params = json!({
            "alpha": c.alpha, "kappa": c.kappa, "grid_n": c.grid_n, "kicks": c.mask_kicks, "seed": c.seed,
        });
        self.stage("mask", params, &[], |p| {
            let c = &p.cfg;
            let grid = PhaseGrid::new(c.grid_n)?;
            let mask = chaotic_mask(c.alpha, c.kappa, grid, c.mask_kicks, SeedChoice::Auto { rng_seed: c.seed })?;
            if !mask.chaotic_sea {
                log::warn!("no chaotic sea found; every cell is labeled regular");
            }
            write_csv(
                &p.path("mask.csv"),
                &["p", "q", "phi", "cos_theta", "label", "visits"],
                (0..grid.cells()).map(|cell| {
                    let (pi, qi) = grid.coords(cell);
                    vec![
                        pi.to_string(),
                        qi.to_string(),
                        num(grid.phi(qi)),
                        num(grid.cos_theta(pi)),
                        mask.labels[cell].to_string(),
                        mask.visit_counts[cell].to_string(),
                    ]
                }),
            )?;
            write_json(
                &p.path("mask.json"),
                &MaskMeta {
                    grid_n: c.grid_n,
                    kicks: mask.kicks,
                    chaotic_sea: mask.chaotic_sea,
                    chaotic_fraction: mask.chaotic_fraction(),
                    seed_exponent: mask.seed_exponent,
                    seed_point: mask.seed_point.map(|s| [s.phi, s.cos_theta()]),
                },
            )?;
            Ok(vec!["mask.csv".into(), "mask.json".into()])
        })
    }

    pub fn spectrum(&mut self) -> Result<bool> {
        let c = &self.cfg;
        let params = json!({"S": c.spin, "alpha": c.alpha, "kappa": c.kappa, "observable": c.observable});
        self.stage("spectrum", params, &[], |p| {
            let c = &p.cfg;
            let spec = kicked_top_spectrum(c.spin_checked()?, c.alpha, c.kappa, c.observable_checked()?)?;
            write_csv(
                &p.path("spectrum.csv"),
                &["k", "quasienergy", "degenerate"],
                (0..spec.dim()).map(|k| {
                    vec![k.to_string(), num(spec.quasienergies[k]), u8::from(spec.is_degenerate(k)).to_string()]
                }),
            )?;
            let bin = p.path("eigenvectors.bin");
            let file = std::fs::File::create(&bin).map_err(CliError::io(&bin))?;
            spec.write_eigenvectors(std::io::BufWriter::new(file))?;
            write_json(
                &p.path("eigenvectors.json"),
                &SpectrumMeta {
                    spin: c.spin,
                    dim: spec.dim(),
                    observable: c.observable.clone(),
                    layout: "row-major dim x dim, entry (i, k) = <m_i|eps_k> with m_i = S - i; each entry is \
                             (re, im) as little-endian f64; columns ordered by ascending quasienergy"
                        .into(),
                },
            )?;
            Ok(vec!["spectrum.csv".into(), "eigenvectors.bin".into(), "eigenvectors.json".into()])
        })
    }

    fn load_spectrum(&self) -> Result<FloquetSpectrum> {
        let meta_path = self.require("eigenvectors.json", "spectrum")?;
        let meta: SpectrumMeta = read_json(&meta_path)?;
        let spin = self.cfg.spin_checked()?;
        if meta.dim != spin.dim() || meta.observable != self.cfg.observable {
            return Err(CliError::StaleArtifact {
                file: "eigenvectors.bin".into(),
                reason: format!(
                    "built for S = {} ({}), config asks for S = {} ({})",
                    meta.spin, meta.observable, self.cfg.spin, self.cfg.observable
                ),
                producer: "spectrum",
            });
        }
        let table = Table::read(&self.require("spectrum.csv", "spectrum")?)?;
        let eps: Vec<f64> = table.column("quasienergy")?;
        let bin = self.require("eigenvectors.bin", "spectrum")?;
        let file = std::fs::File::open(&bin).map_err(CliError::io(&bin))?;
        let vecs = read_eigenvectors(std::io::BufReader::new(file), spin.dim())?;
        Ok(FloquetSpectrum::from_parts(spin, eps, vecs, self.cfg.observable_checked()?)?)
    }

    fn load_mask(&self) -> Result<ChaoticMask> {
        let meta: MaskMeta = read_json(&self.require("mask.json", "mask")?)?;
        if meta.grid_n != self.cfg.grid_n {
            return Err(CliError::StaleArtifact {
                file: "mask.csv".into(),
                reason: format!("grid {} does not match grid_n = {}", meta.grid_n, self.cfg.grid_n),
                producer: "mask",
            });
        }
        let table = Table::read(&self.require("mask.csv", "mask")?)?;
        let grid = PhaseGrid::new(meta.grid_n)?;
        let labels: Vec<i8> = table.column("label")?;
        if labels.len() != grid.cells() {
            return Err(CliError::Malformed {
                path: self.path("mask.csv"),
                reason: format!("{} rows for {} cells", labels.len(), grid.cells()),
            });
        }
        let mut mask = ChaoticMask::uniform(grid, -1);
        mask.labels = labels;
        mask.visit_counts = table.column("visits")?;
        mask.chaotic_sea = meta.chaotic_sea;
        mask.seed_exponent = meta.seed_exponent;
        mask.kicks = meta.kicks;
        Ok(mask)
    }

    pub fn chi(&mut self) -> Result<bool> {
        let c = &self.cfg;
        let params = json!({"thresholds": c.thresholds});
        let inputs = [
            ("mask.csv", "mask"),
            ("mask.json", "mask"),
            ("spectrum.csv", "spectrum"),
            ("eigenvectors.bin", "spectrum"),
        ];
        self.stage("chi", params, &inputs, |p| {
            let spec = p.load_spectrum()?;
            let mask = p.load_mask()?;
            let thresholds = p.cfg.thresholds_checked()?;
            let sweep = husimi_sweep(&spec, &mask, &[]);
            let chi: Vec<f64> = sweep.indices.iter().map(|i| i.chi).collect();
            let reps = Representatives::pick(&chi);
            let mut counts = BTreeMap::new();
            for &x in &chi {
                *counts.entry(classify(x, thresholds).to_string()).or_insert(0) += 1;
            }
            write_csv(
                &p.path("chi.csv"),
                &["k", "quasienergy", "chi", "chi_raw", "husimi_norm", "label"],
                sweep.indices.iter().map(|i| {
                    vec![
                        i.k.to_string(),
                        num(spec.quasienergies[i.k]),
                        num(i.chi),
                        num(i.raw),
                        num(i.norm),
                        classify(i.chi, thresholds).to_string(),
                    ]
                }),
            )?;
            write_json(
                &p.path("chi.json"),
                &ChiSummary {
                    representatives: reps,
                    counts,
                    chaotic_sea: mask.chaotic_sea,
                },
            )?;
            let mut outputs = vec!["chi.csv".to_string(), "chi.json".to_string()];
            let states = reps.states();
            let fields = husimi_sweep(&spec, &mask, &states).fields;
            for f in fields {
                let name = format!("husimi/k_{}.csv", f.k);
                write_field(&p.path(&name), mask.grid, &f.values, "husimi")?;
                outputs.push(name);
            }
            Ok(outputs)
        })
    }

    fn otoc_times(&self) -> Result<Vec<u32>> {
        let c = &self.cfg;
        let mut times = required_times(c.tau()?, c.t0, c.window);
        times.extend(&c.snapshot_times);
        times.sort_unstable();
        times.dedup();
        Ok(times)
    }

    pub fn otoc(&mut self) -> Result<bool> {
        let c = &self.cfg;
        let params = json!({
            "grid_n": c.grid_n, "t0": c.t0, "T": c.window, "tau": c.tau()?, "snapshots": c.snapshot_times,
        });
        let inputs = [
            ("spectrum.csv", "spectrum"),
            ("eigenvectors.bin", "spectrum"),
            ("chi.json", "chi"),
        ];
        self.stage("otoc", params, &inputs, |p| {
            let c = &p.cfg;
            let spec = p.load_spectrum()?;
            let summary: ChiSummary = read_json(&p.path("chi.json"))?;
            let grid = PhaseGrid::new(c.grid_n)?;
            let engine = OtocEngine::new(&spec, grid);
            let times = p.otoc_times()?;
            log::info!("otoc: {} states x {} times on {} cells", spec.dim(), times.len(), grid.cells());
            let table = engine.series(&times);
            write_csv(
                &p.path("otoc_series.csv"),
                &["k", "t", "C"],
                (0..spec.dim()).flat_map(|k| {
                    let table = &table;
                    table
                        .times
                        .iter()
                        .zip(&table.values)
                        .map(move |(t, row)| vec![k.to_string(), t.to_string(), num(row[k])])
                }),
            )?;
            if !spec.degeneracies.is_empty() {
                log::warn!("analytic long-time average assumes a non-degenerate spectrum");
            }
            let q4 = engine.longtime_analytic(AnalyticForm::Fourth);
            let q2 = engine.longtime_analytic(AnalyticForm::Second);
            let tau = c.tau()?;
            let gamma_at = |k: usize| -> Result<f64> {
                Ok(kicked_top::otoc::growth_rate_with(&table.series(k), tau)?)
            };
            let mut rows = Vec::with_capacity(spec.dim());
            for k in 0..spec.dim() {
                let cbar = table
                    .window_mean(k, c.t0, c.t0 + c.window)
                    .ok_or(kicked_top::Error::MissingTime(c.t0))?;
                rows.push(vec![k.to_string(), num(gamma_at(k)?), num(cbar), num(q4[k]), num(q2[k])]);
            }
            write_csv(
                &p.path("otoc_longtime.csv"),
                &["k", "gamma", "cbar_numeric", "cbar_analytic_q4", "cbar_analytic_q2"],
                rows,
            )?;
            let mut outputs = vec!["otoc_series.csv".to_string(), "otoc_longtime.csv".to_string()];
            let states = summary.representatives.states();
            for &t in &c.snapshot_times {
                for f in engine.fields(t, &states) {
                    let name = format!("otoc_fields/k_{}_t_{}.csv", f.k, t);
                    write_field(&p.path(&name), grid, &f.values, "c")?;
                    outputs.push(name);
                }
            }
            Ok(outputs)
        })
    }

    /// Series and snapshot fields for one eigenstate, outside the cache.
    pub fn otoc_single(&self, k: usize) -> Result<Vec<PathBuf>> {
        let spec = self.load_spectrum()?;
        if k >= spec.dim() {
            return Err(CliError::Usage(format!("--k {k} out of range: dimension is {}", spec.dim())));
        }
        let grid = PhaseGrid::new(self.cfg.grid_n)?;
        let engine = OtocEngine::new(&spec, grid);
        let times = self.otoc_times()?;
        let table = engine.series(&times);
        let series = table.series(k);
        let path = self.path(&format!("otoc_k{k}.csv"));
        write_csv(
            &path,
            &["t", "C"],
            series.times.iter().zip(&series.avg).map(|(t, v)| vec![t.to_string(), num(*v)]),
        )?;
        let mut written = vec![path];
        for &t in &self.cfg.snapshot_times {
            let f = engine.fields(t, &[k]).pop().expect("one field");
            let p = self.path(&format!("otoc_fields/k_{k}_t_{t}.csv"));
            write_field(&p, grid, &f.values, "c")?;
            written.push(p);
        }
        Ok(written)
    }

    pub fn analyze(&mut self) -> Result<bool> {
        let c = &self.cfg;
        let params = json!({
            "S": c.spin, "thresholds": c.thresholds, "bins": c.histogram_bins, "analytic_power": c.analytic_power,
        });
        let inputs = [
            ("spectrum.csv", "spectrum"),
            ("chi.csv", "chi"),
            ("otoc_longtime.csv", "otoc"),
        ];
        self.stage("analyze", params, &inputs, |p| p.write_statistics())
    }

    fn write_statistics(&self) -> Result<Vec<String>> {
        let c = &self.cfg;
        let spin = c.spin_checked()?;
        let thresholds = c.thresholds_checked()?;
        let spectrum = Table::read(&self.path("spectrum.csv"))?;
        let chi_t = Table::read(&self.path("chi.csv"))?;
        let otoc_t = Table::read(&self.path("otoc_longtime.csv"))?;
        let dim = spin.dim();
        for (t, name, producer) in [(&spectrum, "spectrum.csv", "spectrum"), (&chi_t, "chi.csv", "chi"), (&otoc_t, "otoc_longtime.csv", "otoc")] {
            if t.len() != dim {
                return Err(CliError::StaleArtifact {
                    file: name.into(),
                    reason: format!("{} rows, expected {dim}", t.len()),
                    producer,
                });
            }
        }
        let eps: Vec<f64> = spectrum.column("quasienergy")?;
        let degenerate: Vec<u8> = spectrum.column("degenerate")?;
        let chi: Vec<f64> = chi_t.column("chi")?;
        let gamma: Vec<f64> = otoc_t.column("gamma")?;
        let cbar: Vec<f64> = otoc_t.column("cbar_numeric")?;
        let analytic_col = match c.analytic_form()? {
            AnalyticForm::Fourth => "cbar_analytic_q4",
            AnalyticForm::Second => "cbar_analytic_q2",
        };
        let analytic: Vec<f64> = otoc_t.column(analytic_col)?;
        let labels: Vec<Label> = chi.iter().map(|&x| classify(x, thresholds)).collect();

        write_csv(
            &self.path("profiles.csv"),
            &["k", "quasienergy", "chi", "gamma", "cbar_numeric", "cbar_analytic", "label", "degenerate"],
            (0..dim).map(|k| {
                vec![
                    k.to_string(),
                    num(eps[k]),
                    num(chi[k]),
                    num(gamma[k]),
                    num(cbar[k]),
                    num(analytic[k]),
                    labels[k].to_string(),
                    degenerate[k].to_string(),
                ]
            }),
        )?;
        let count = |l: Label| labels.iter().filter(|&&x| x == l).count();
        write_json(
            &self.path("profiles.json"),
            &json!({
                "S": c.spin,
                "states": dim,
                "tau": c.tau()?,
                "t0": c.t0,
                "T_window": c.window,
                "analytic_column": analytic_col,
                "labels": {
                    "regular": count(Label::Regular),
                    "mixed": count(Label::Mixed),
                    "chaotic": count(Label::Chaotic),
                },
                "degenerate_states": degenerate.iter().filter(|&&d| d == 1).count(),
            }),
        )?;

        let mut outputs = vec!["profiles.csv".to_string(), "profiles.json".to_string()];
        let weight = dim as f64;
        let mut peaks = BTreeMap::new();
        let mut chi_hist = None;
        for (name, values) in [("chi", &chi), ("gamma", &gamma), ("cbar", &cbar)] {
            let h = histogram(values, c.histogram_bins, weight)?;
            let file = format!("histograms/{name}.csv");
            write_histogram(&self.path(&file), &h)?;
            outputs.push(file);
            peaks.insert(name, h.peak());
            if name == "chi" {
                chi_hist = Some(h);
            }
        }
        let chi_hist = chi_hist.expect("chi histogram");
        let outer = chi_hist.mass_between(-1.0, -0.6) + chi_hist.mass_between(0.6, 1.0);

        let pair = |a: &str, u: &[f64], b: &str, v: &[f64]| match correlate(a, u, b, v) {
            Ok(r) => json!({"first": a, "second": b, "r_p": r.r_p, "samples": r.samples}),
            Err(e) => json!({"first": a, "second": b, "r_p": null, "samples": u.len(), "error": e.to_string()}),
        };
        write_json(
            &self.path("correlations.json"),
            &json!({
                "S": c.spin,
                "alpha": c.alpha,
                "kappa": c.kappa,
                "samples": dim,
                "pairs": [
                    pair("chi", &chi, "gamma", &gamma),
                    pair("chi", &chi, "cbar", &cbar),
                    pair("chi", &chi, "cbar_analytic", &analytic),
                    pair("gamma", &gamma, "cbar", &cbar),
                ],
                "peaks": peaks,
                "chi_outer_quintile_mass": outer,
                "chi_middle_mass": chi_hist.total_mass() - outer,
            }),
        )?;
        outputs.push("correlations.json".into());
        Ok(outputs)
    }
}

fn write_field(path: &Path, grid: PhaseGrid, values: &[f64], column: &str) -> Result<()> {
    write_csv(
        path,
        &["p", "q", "phi", "cos_theta", column],
        values.iter().enumerate().map(|(cell, v)| {
            let (pi, qi) = grid.coords(cell);
            vec![pi.to_string(), qi.to_string(), num(grid.phi(qi)), num(grid.cos_theta(pi)), num(*v)]
        }),
    )
}

fn write_histogram(path: &Path, h: &Histogram) -> Result<()> {
    write_csv(
        path,
        &["bin_lo", "bin_hi", "center", "density"],
        h.bin_edges
            .windows(2)
            .zip(h.centers())
            .zip(&h.densities)
            .map(|((w, c), d)| vec![num(w[0]), num(w[1]), num(c), num(*d)]),
    )
}

/// Correlation coefficients across several `profiles.csv` files; the spin is
/// inferred from the row count (`2S + 1`).
pub fn analyze_profiles(files: &[PathBuf], out: &Path) -> Result<Vec<PathBuf>> {
    let mut sizes = Vec::with_capacity(files.len());
    for f in files {
        if !f.exists() {
            return Err(CliError::Usage(format!("profiles file {} does not exist", f.display())));
        }
        let t = Table::read(f)?;
        if t.is_empty() {
            return Err(CliError::Malformed {
                path: f.clone(),
                reason: "no rows".into(),
            });
        }
        let spin = Spin::from_twice((t.len() - 1) as u32).map_err(|e| CliError::Malformed {
            path: f.clone(),
            reason: e.to_string(),
        })?;
        sizes.push(SizeSamples {
            spin: spin.value(),
            chi: t.column("chi")?,
            gamma: t.column("gamma")?,
            cbar: t.column("cbar_numeric")?,
        });
    }
    let rows = correlation_sweep(&sizes).map_err(|e| CliError::Usage(e.to_string()))?;
    std::fs::create_dir_all(out).map_err(CliError::io(out))?;
    let csv_path = out.join("correlation_sweep.csv");
    write_csv(
        &csv_path,
        &["S", "samples", "r_chi_gamma", "r_chi_cbar"],
        rows.iter().map(|r| {
            vec![num(r.spin), r.chi_gamma.samples.to_string(), num(r.chi_gamma.r_p), num(r.chi_cbar.r_p)]
        }),
    )?;
    let json_path = out.join("correlation_sweep.json");
    let entries: Vec<_> = rows
        .iter()
        .zip(files)
        .map(|(r, f)| {
            json!({
                "S": r.spin,
                "source": f.display().to_string(),
                "samples": r.chi_gamma.samples,
                "r_chi_gamma": r.chi_gamma.r_p,
                "r_chi_cbar": r.chi_cbar.r_p,
                "cbar_more_reliable": r.chi_cbar.r_p > r.chi_gamma.r_p,
            })
        })
        .collect();
    write_json(&json_path, &entries)?;
    Ok(vec![csv_path, json_path])
}
