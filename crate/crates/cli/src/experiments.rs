//! The seven experiments.

use std::path::Path;

use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use kamstab::dynamics::{divergence_traj, expectation_traj, gibbs_drift, observable_drift, TimeGrid, Trajectory};
use kamstab::io::{matrix_from_json_str, write_trajectory};
use kamstab::kam::{bounds, isospectral_blockdiag, isospectral_blockdiag_general, KamResult};
use kamstab::lindblad::{
    dephasing, dephasing_symmetries, monotone, monotone_traj, monotone_violation, qubit_state, transverse_drive,
    MonotoneSpec,
};
use kamstab::matcore::op_norm;
use kamstab::models::{all_up, build_model, magnetization, random_hermitian, random_state, Axis, Role};
use kamstab::spectral::{default_cluster_tol, poly_coeffs_default, resolve_default, riesz_resolve, SpectralResolution};
use kamstab::symmetry::{classify, decompose_observable, zeno_project, DEFAULT_CLASSIFY_TOL};
use kamstab::verify::run_all;
use kamstab::ComplexMatrix;

use crate::config::{is_matrix_path, ConfigError, Experiment, ExperimentConfig, GridSpacing};
use crate::{CliError, Context, RunOutcome};

pub(crate) fn dispatch(cfg: &ExperimentConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let mut run = Run { cfg, dir, artifacts: Vec::new(), summary: Vec::new(), passed: true };
    let results = match cfg.experiment {
        Experiment::Decompose => run.decompose()?,
        Experiment::Kam => run.kam()?,
        Experiment::Bounds => run.bounds()?,
        Experiment::Evolve => run.evolve()?,
        Experiment::HeisenbergFig => run.heisenberg_fig()?,
        Experiment::LindbladDemo => run.lindblad_demo()?,
        Experiment::Verify => run.verify(),
    };
    Ok(RunOutcome {
        output_dir: dir.to_path_buf(),
        artifacts: run.artifacts,
        results,
        passed: run.passed,
        summary: run.summary,
    })
}

struct Run<'a> {
    cfg: &'a ExperimentConfig,
    dir: &'a Path,
    artifacts: Vec<String>,
    summary: Vec<String>,
    passed: bool,
}

fn role_seed(seed: u64, role: Role) -> u64 {
    match role {
        Role::System => seed,
        Role::Perturbation => seed.wrapping_add(1),
        Role::Observable => seed.wrapping_add(2),
    }
}

fn role_key(role: Role) -> &'static str {
    match role {
        Role::System => "system",
        Role::Perturbation => "perturbation",
        Role::Observable => "observable",
    }
}

fn complex_json(z: C64) -> Value {
    json!([z.re, z.im])
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    serde_json::to_value(m).expect("matrices serialize")
}

fn max_deviation(traj: &Trajectory) -> f64 {
    let v = traj.real_values().expect("real trajectory");
    v.iter().map(|x| (x - v[0]).abs()).fold(0.0, f64::max)
}

/// `⟨M⟩_t − ⟨M⟩_0`
fn deviation(mut traj: Trajectory, quantity: &str) -> Trajectory {
    if let kamstab::dynamics::TrajValues::Real(v) = &mut traj.values {
        let v0 = v[0];
        v.iter_mut().for_each(|x| *x -= v0);
    }
    traj.meta.quantity = quantity.to_string();
    traj
}

impl Run<'_> {
    fn model(&self, role: Role) -> Result<Option<ComplexMatrix>, CliError> {
        let key = role_key(role);
        let spec = match role {
            Role::System => &self.cfg.system,
            Role::Perturbation => &self.cfg.perturbation,
            Role::Observable => &self.cfg.observable,
        };
        let Some(spec) = spec else { return Ok(None) };
        let m = if is_matrix_path(spec) {
            let text = std::fs::read_to_string(spec).map_err(|e| ConfigError::new(key, format!("{spec}: {e}")))?;
            matrix_from_json_str(&text).map_err(|e| ConfigError::new(key, format!("{spec}: {e}")))?
        } else {
            build_model(spec, role, role_seed(self.cfg.seed, role)).map_err(|e| ConfigError::new(key, e.to_string()))?
        };
        Ok(Some(m))
    }

    fn required(&self, role: Role) -> Result<ComplexMatrix, CliError> {
        self.model(role)?.ok_or_else(|| ConfigError::new(role_key(role), "required for this experiment").into())
    }

    fn epsilon(&self, default: Option<f64>) -> Result<f64, CliError> {
        self.cfg.epsilon.or(default).ok_or_else(|| ConfigError::new("epsilon", "required for this experiment").into())
    }

    fn grid(&self, default: impl FnOnce() -> kamstab::Result<TimeGrid>) -> Result<TimeGrid, CliError> {
        match &self.cfg.grid {
            None => default().map_err(|e| ConfigError::new("grid", e.to_string()).into()),
            Some(g) => match g.spacing {
                GridSpacing::Linear => TimeGrid::linear(g.t_max, g.points),
                GridSpacing::Geometric => TimeGrid::geometric(g.t_min.unwrap_or(g.t_max * 1e-6), g.t_max, g.points),
            }
            .map_err(|e| ConfigError::new("grid", e.to_string()).into()),
        }
    }

    fn same_dim(&self, a: &ComplexMatrix, b: &ComplexMatrix, key: &str) -> Result<(), CliError> {
        if a.dim() != b.dim() {
            return Err(ConfigError::new(key, format!("dimension {} does not match the system ({})", b.dim(), a.dim())).into());
        }
        Ok(())
    }

    fn emit(&mut self, stem: &str, mut traj: Trajectory, model: &str) -> Result<(), CliError> {
        traj.meta = traj.meta.seed(self.cfg.seed).model(model);
        write_trajectory(self.dir, stem, &traj).context(&format!("writing {stem}"))?;
        self.artifacts.push(format!("{stem}.csv"));
        self.artifacts.push(format!("{stem}.json"));
        Ok(())
    }

    fn system_label(&self) -> String {
        self.cfg.system.clone().unwrap_or_default()
    }

    fn resolve(&self, h: &ComplexMatrix) -> Result<SpectralResolution, CliError> {
        if h.is_hermitian(1e-10 * h.max_abs().max(1.0)) {
            resolve_default(h).context("spectral resolution of the system")
        } else {
            riesz_resolve(h, default_cluster_tol(h)).context("spectral resolution of the system")
        }
    }

    fn resolution_json(res: &SpectralResolution) -> Value {
        json!({
            "eigenvalues": res.eigenvalues.iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
            "multiplicities": res.multiplicities,
            "gap": res.gap,
            "oblique": res.oblique,
        })
    }

    fn decompose(&mut self) -> Result<Value, CliError> {
        let h = self.required(Role::System)?;
        let m = self.required(Role::Observable)?;
        self.same_dim(&h, &m, "observable")?;
        let res = resolve_default(&h).context("spectral resolution of the system")?;
        let parts = decompose_observable(&res, &m).context("decomposing the observable")?;
        let class = classify(&res, &m, DEFAULT_CLASSIFY_TOL).context("classifying the observable")?;
        let poly = poly_coeffs_default(&res, &m).ok();
        let [n, r, f] = parts.part_norms();
        self.summary.push(format!("label: {:?} (‖noncons‖ = {n:.3e}, ‖robust‖ = {r:.3e}, ‖fragile‖ = {f:.3e})", class.label));
        Ok(json!({
            "spectrum": Self::resolution_json(&res),
            "part_norms": {"noncons": n, "robust": r, "fragile": f},
            "label": class.label,
            "threshold": class.threshold,
            "residual": parts.residual,
            "polynomial": poly.map(|p| json!({
                "coefficients": p.coefficients.iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
                "residual": p.residual,
            })),
            "parts": {
                "noncons": matrix_json(&parts.noncons),
                "robust": matrix_json(&parts.robust),
                "fragile": matrix_json(&parts.fragile),
            },
        }))
    }

    fn resummation(&self, res: &SpectralResolution, v: &ComplexMatrix, eps: f64) -> Result<KamResult, CliError> {
        if res.oblique {
            isospectral_blockdiag_general(res, v, eps).context("isospectral resummation")
        } else {
            isospectral_blockdiag(res, v, eps).context("isospectral resummation")
        }
    }

    fn kam(&mut self) -> Result<Value, CliError> {
        let h = self.required(Role::System)?;
        let v = self.required(Role::Perturbation)?;
        self.same_dim(&h, &v, "perturbation")?;
        let eps = self.epsilon(None)?;
        let res = self.resolve(&h)?;
        let kam = self.resummation(&res, &v, eps)?;
        if !res.oblique && eps > 0.0 {
            let grid = self.grid(|| TimeGrid::default_for(eps))?;
            let traj = divergence_traj(&h, &v, eps, &kam.v_resummed, &grid).context("divergence")?;
            self.summary.push(format!("max divergence from resummed dynamics: {:.3e}", traj.max_abs()));
            self.emit("divergence_resummed", traj, &self.system_label())?;
        }
        self.summary.push(format!(
            "‖block-off-diagonal residual‖ = {:.3e}, spectral mismatch = {:.3e}",
            kam.residual_blockdiag, kam.residual_isospectral
        ));
        Ok(json!({
            "spectrum": Self::resolution_json(&res),
            "epsilon": eps,
            "residual_blockdiag": kam.residual_blockdiag,
            "residual_isospectral": kam.residual_isospectral,
            "w_distance": kam.w_distance,
            "bounds": kam.bounds,
            "v_resummed": matrix_json(&kam.v_resummed),
            "v_z": matrix_json(&kam.v_z),
            "v1": matrix_json(&kam.v1),
            "k1": matrix_json(&kam.k1),
        }))
    }

    fn bounds(&mut self) -> Result<Value, CliError> {
        let eps = self.epsilon(None)?;
        let given = self.cfg.bounds.clone().unwrap_or_default();
        let (d, eta) = match (given.d, given.eta) {
            (Some(d), Some(eta)) => (d, eta),
            (d, eta) => {
                let h = self.required(Role::System)?;
                let res = resolve_default(&h).context("spectral resolution of the system")?;
                (d.unwrap_or(res.d()), eta.unwrap_or(res.gap))
            }
        };
        let norm_v = match given.norm_v {
            Some(n) => n,
            None => self.model(Role::Perturbation)?.map(|v| op_norm(&v)).unwrap_or(1.0),
        };
        let report = bounds(d, eta, norm_v, eps).context("evaluating the bounds")?;
        self.summary.push(format!(
            "7√d·ε/η = {:.6}, δ̂∞ = {:.6}, valid: {}",
            report.linear_bound, report.delta_hat_inf, report.validity
        ));
        Ok(serde_json::to_value(report).expect("report serializes"))
    }

    fn evolve(&mut self) -> Result<Value, CliError> {
        let h = self.required(Role::System)?;
        let v = self.required(Role::Perturbation)?;
        self.same_dim(&h, &v, "perturbation")?;
        let eps = self.epsilon(None)?;
        let res = resolve_default(&h).context("spectral resolution of the system")?;
        let grid = self.grid(|| TimeGrid::default_for(eps))?;
        let label = self.system_label();
        let mut out = json!({"epsilon": eps, "points": grid.len(), "t_max": grid.t_max()});

        let v_z = zeno_project(&res, &v).context("Zeno projection")?;
        let dz = divergence_traj(&h, &v, eps, &v_z, &grid).context("Zeno divergence")?;
        out["max_divergence_zeno"] = json!(dz.max_abs());
        self.emit("divergence_zeno", dz, &label)?;

        match isospectral_blockdiag(&res, &v, eps) {
            Ok(kam) => {
                let dr = divergence_traj(&h, &v, eps, &kam.v_resummed, &grid).context("resummed divergence")?;
                out["max_divergence_resummed"] = json!(dr.max_abs());
                out["bounds"] = json!(kam.bounds);
                self.emit("divergence_resummed", dr, &label)?;
            }
            Err(e) => {
                out["resummation_error"] = json!(e.to_string());
                self.summary.push(format!("resummation skipped: {e}"));
            }
        }
        if let Some(m) = self.model(Role::Observable)? {
            self.same_dim(&h, &m, "observable")?;
            let drift = observable_drift(&h, &v, eps, &m, &grid).context("observable drift")?;
            out["max_observable_drift"] = json!(drift.max_abs());
            out["observable_drift_variant"] = json!(drift.meta.variant);
            self.emit("observable_drift", drift, &label)?;
        }
        if let Some(beta) = self.cfg.beta {
            let g = gibbs_drift(&h, &v, eps, beta, &grid).context("Gibbs drift")?;
            out["max_gibbs_drift"] = json!(g.max_abs());
            self.emit("gibbs_drift", g, &label)?;
        }
        for (k, val) in out.as_object().expect("object") {
            if k.starts_with("max_") {
                self.summary.push(format!("{k}: {val}"));
            }
        }
        Ok(out)
    }

    fn heisenberg_fig(&mut self) -> Result<Value, CliError> {
        let h = match self.model(Role::System)? {
            Some(h) => h,
            None => build_model("heisenberg:N=4,normalize=true", Role::System, self.cfg.seed).context("default system")?,
        };
        let dim = h.dim();
        if !dim.is_power_of_two() || dim < 4 {
            return Err(ConfigError::new("system", format!("expected a spin chain, got dimension {dim}")).into());
        }
        let n = dim.trailing_zeros() as usize;
        let eps = self.epsilon(Some(0.02))?;
        let seed = self.cfg.seed;
        let v = match self.model(Role::Perturbation)? {
            Some(v) => v,
            None => random_hermitian(dim, role_seed(seed, Role::Perturbation)).context("default perturbation")?,
        };
        let m = match self.model(Role::Observable)? {
            Some(m) => m,
            None => random_hermitian(dim, role_seed(seed, Role::Observable)).context("default observable")?,
        };
        self.same_dim(&h, &v, "perturbation")?;
        self.same_dim(&h, &m, "observable")?;
        let psi0 = random_state(dim, seed.wrapping_add(3)).context("initial state")?;
        let grid = self.grid(|| TimeGrid::linear(1000.0, 2000))?;
        let res = resolve_default(&h).context("spectral resolution of the system")?;
        let parts = decompose_observable(&res, &m).context("decomposing the observable")?;
        let g = h.add_scaled(C64::new(eps, 0.0), &v);
        let label = self.system_label();

        let mut out = json!({"N": n, "epsilon": eps, "points": grid.len(), "t_max": grid.t_max()});
        for (stem, op) in [("noncons", &parts.noncons), ("robust", &parts.robust), ("fragile", &parts.fragile), ("energy", &h)] {
            let traj = expectation_traj(&g, op, &psi0, &grid).context(stem)?;
            let dev = deviation(traj, &format!("{stem}_deviation"));
            out[format!("max_deviation_{stem}")] = json!(dev.max_abs());
            self.emit(stem, dev, &label)?;
        }

        // The fragile charge Q₁ = Σσ_z perturbed by Q̃₁ = Σσ_x, from all spins up.
        let q1 = magnetization(n, Axis::Z).context("Q1")?;
        let q1x = magnetization(n, Axis::X).context("Q1 perturbation")?;
        let gq = h.add_scaled(C64::new(eps, 0.0), &q1x);
        let traj = expectation_traj(&gq, &q1, &all_up(n).context("initial state")?, &grid).context("Q1")?;
        out["max_deviation_q1"] = json!(max_deviation(&traj));
        self.emit("q1", deviation(traj, "q1_deviation"), &label)?;

        for k in ["noncons", "robust", "fragile", "energy", "q1"] {
            self.summary.push(format!("max |deviation| {k}: {:.4e}", out[format!("max_deviation_{k}")].as_f64().unwrap_or(f64::NAN)));
        }
        Ok(out)
    }

    fn lindblad_demo(&mut self) -> Result<Value, CliError> {
        let p = self.cfg.lindblad.clone().unwrap_or_default();
        let eps = self.epsilon(Some(0.1))?;
        let l = dephasing(p.omega, p.kappa).context("dephasing generator")?;
        let v = transverse_drive(p.g.unwrap_or(p.kappa)).context("drive")?;
        let rho0 = qubit_state(p.state);
        let grid = self.grid(|| TimeGrid::default_for(eps.max(1e-12)))?;
        let (robust, fragile) = dephasing_symmetries().context("symmetries")?;
        let mut out = json!({"epsilon": eps, "lambda": self.cfg.lambda, "omega": p.omega, "kappa": p.kappa,
                             "g": p.g.unwrap_or(p.kappa), "state": p.state});
        for (name, m) in [("robust", robust), ("fragile", fragile)] {
            let spec = MonotoneSpec::new(m, self.cfg.lambda).context("monotone")?;
            let f0 = monotone(&spec, &rho0).context("initial monotone")?;
            let (u, pt) = monotone_traj(&l, &v, eps, &spec, &rho0, &grid).context(name)?;
            let viol = monotone_violation(u.real_values().expect("real"), pt.real_values().expect("real"));
            out[name] = json!({"initial": f0, "violation": viol});
            self.summary.push(format!(
                "{name}: f(0) = {f0:.6}, max (f − f(0)) = {:.3e}, max |f_ε − f_0| = {:.3e}",
                viol.above_initial, viol.deviation
            ));
            self.emit(&format!("{name}_unperturbed"), u, "dephasing")?;
            self.emit(&format!("{name}_perturbed"), pt, "dephasing")?;
        }
        Ok(out)
    }

    fn verify(&mut self) -> Value {
        let outcomes = run_all(self.cfg.seed);
        self.passed = outcomes.iter().all(|o| o.passed);
        self.summary.extend(outcomes.iter().map(|o| o.to_string()));
        let passed = outcomes.iter().filter(|o| o.passed).count();
        self.summary.push(format!("{passed}/{} criteria passed", outcomes.len()));
        json!({"seed": self.cfg.seed, "passed": self.passed, "criteria": outcomes})
    }
}
