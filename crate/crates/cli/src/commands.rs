use std::path::Path;

use qco_core::model::{find_extrema, junction_extrema, Potential};
use qco_core::qc::{
    classify_orbit, curvature_frame, evolve_qc, switching_scan, EffectivePotential,
    GaussianState, QcTrace, ReferenceFrame,
};
use qco_core::scan::scan as run_scan;
use qco_core::tdse::{
    evolve as run_evolve, evolve_nonlinear, gaussian_packet, lowest_eigenpairs, metastable_packet,
    spectral_doublet, GridHamiltonian, PropagatorConfig,
};
use qco_core::Result;

use crate::config::RunConfig;
use crate::output::{write_csv, write_text, Report};

const POTENTIAL_HEADER: [&str; 4] = ["x", "V_p", "V_d", "V_total"];
const SPECTRUM_STATES: usize = 40;

fn potential_rows(config: &RunConfig, bias: f64) -> Result<Vec<Vec<f64>>> {
    let j = config.junction(bias)?;
    Ok(config
        .grid_spec()?
        .points()
        .map(|x| vec![x, j.binding_value(x), j.dipole_value(x), j.value(x)])
        .collect())
}

/// Junction curves at zero and working bias, `ψ₀` and the packet at the
/// moment of largest transfer.
pub fn potential(config: &RunConfig, dir: &Path) -> Result<Report> {
    let mut r = Report::default();
    let bias = config.potential.bias;
    write_csv(dir, "potential.csv", &POTENTIAL_HEADER, potential_rows(config, bias)?, &mut r)?;
    write_csv(dir, "potential_zero_bias.csv", &POTENTIAL_HEADER, potential_rows(config, 0.0)?, &mut r)?;
    for (label, u) in [("zero bias", 0.0), ("working bias", bias)] {
        let e = junction_extrema(&config.junction(u)?)?;
        r.note(format!(
            "{label} U = {u} V: x = ({:.4}, {:.4}, {:.4}) A, V = ({:.4}, {:.4}, {:.4}) meV",
            e.x_meta, e.x_barrier, e.x_stable, e.v_meta, e.v_barrier, e.v_stable
        ));
    }

    let c = config.consts();
    let grid = config.grid_spec()?;
    let j = config.junction(bias)?;
    let packet = metastable_packet(grid, &j, c.mass, c.hbar)?;
    let prop = PropagatorConfig {
        rho_boundary: Some(packet.extrema.x_barrier),
        snapshot_times: Vec::new(),
        kappa: None,
        ..config.propagator()
    };
    let first = run_evolve(&packet.field, &j, &c, &prop, config.propagator.t_final)?;
    let (t_m, rho_m) = first.trace.rho_max();
    let psi_m = if t_m > 0.0 {
        run_evolve(&packet.field, &j, &c, &prop, t_m)?.field
    } else {
        packet.field.clone()
    };
    let rows = grid.points().enumerate().map(|(k, x)| {
        vec![x, packet.field.re[k], psi_m.re[k].powi(2) + psi_m.im[k].powi(2)]
    });
    write_csv(dir, "packets.csv", &["x", "psi0", "abs2_psiM"], rows, &mut r)?;
    r.note(format!(
        "psi0: omega0 = {:.6} 1/ps at x0 = {:.4} A; psiM at t = {t_m:.4} ps with rho = {rho_m:.4}",
        packet.omega0, packet.extrema.x_meta
    ));
    Ok(r)
}

pub fn scan(config: &RunConfig, dir: &Path) -> Result<Report> {
    let mut r = Report::default();
    let c = config.consts();
    let sc = config.scan_config()?;
    let result = run_scan(&config.junction(0.0)?, &c, &sc)?;
    let rows = result.points.iter().map(|p| vec![p.u, p.rho_max, p.t_at_max]);
    write_csv(dir, "scan.csv", &["U", "rho_max", "t_at_max"], rows, &mut r)?;
    let mut summary = String::new();
    for (k, p) in result.peaks.iter().enumerate() {
        let rows = p.trace.times.iter().zip(&p.trace.rho).map(|(&t, &rho)| vec![t, rho]);
        write_csv(dir, &format!("peak_{k}.csv"), &["t", "rho"], rows, &mut r)?;
        let fit = match &p.fit {
            Ok(f) => format!("T_fit = {:?} ps, Delta_fit = {:?} meV, rms = {:?}", f.t_max, f.delta, f.rms),
            Err(e) => format!("fit: {e}"),
        };
        let spectral = match &p.delta_spectral {
            Ok(d) => format!("Delta_spectral = {d:?} meV, hbar*pi/Delta = {:?} ps", c.hbar * std::f64::consts::PI / d),
            Err(e) => format!("spectral: {e}"),
        };
        let line = format!(
            "peak {k}: U* = {:?} V, rho_max = {:?}, T_max = {:?} ps, prominence = {:?}; {fit}; {spectral}",
            p.u, p.rho_max, p.t_max, p.prominence
        );
        summary.push_str(&line);
        summary.push('\n');
        r.note(line);
    }
    for (p, prom) in &result.secondary {
        summary.push_str(&format!(
            "secondary: U = {:?} V, rho_max = {:?}, prominence = {prom:?}\n",
            p.u, p.rho_max
        ));
    }
    if result.peaks.is_empty() {
        summary.push_str("no peak above the prominence threshold\n");
        r.note("no peak above the prominence threshold");
    }
    write_text(dir, "peaks.txt", &summary, &mut r)?;
    Ok(r)
}

pub fn evolve(config: &RunConfig, dir: &Path) -> Result<Report> {
    let mut r = Report::default();
    let c = config.consts();
    let grid = config.grid_spec()?;
    let j = config.junction(config.potential.bias)?;
    let packet = metastable_packet(grid, &j, c.mass, c.hbar)?;
    if let Some(w) = packet.leakage {
        r.note(format!("packet reaches the grid edge: amplitude {:e}", w.boundary_amplitude));
    }
    let prop = PropagatorConfig {
        rho_boundary: Some(packet.extrema.x_barrier),
        ..config.propagator()
    };
    let t_final = config.propagator.t_final;
    let ev = if prop.kappa.is_some() {
        evolve_nonlinear(&packet.field, &j, &c, &prop, t_final)?
    } else {
        run_evolve(&packet.field, &j, &c, &prop, t_final)?
    };
    let tr = &ev.trace;
    let rows = (0..tr.len()).map(|k| {
        vec![tr.times[k], tr.norm[k], tr.energy[k], tr.mean_x[k], tr.sigma_x2[k], tr.rho[k]]
    });
    write_csv(dir, "evolve.csv", &["t", "norm", "energy", "mean_x", "sigma_x2", "rho"], rows, &mut r)?;
    for (k, s) in ev.snapshots.iter().enumerate() {
        let f = &s.field;
        let rows = grid
            .points()
            .enumerate()
            .map(|(i, x)| vec![x, f.re[i], f.im[i], f.re[i].powi(2) + f.im[i].powi(2)]);
        write_csv(dir, &format!("snapshot_{k}.csv"), &["x", "re", "im", "abs2"], rows, &mut r)?;
        r.note(format!("snapshot_{k}.csv at t = {:?} ps", s.t));
    }
    let (t_m, rho_m) = tr.rho_max();
    r.note(format!(
        "U = {} V: max rho = {rho_m:.6} at t = {t_m:.4} ps; norm drift {:e}; energy drift {:e}",
        config.potential.bias,
        tr.max_norm_drift(),
        tr.max_relative_energy_drift()
    ));
    Ok(r)
}

pub fn spectrum(config: &RunConfig, dir: &Path) -> Result<Report> {
    let mut r = Report::default();
    let c = config.consts();
    let grid = config.grid_spec()?;
    let j = config.junction(config.potential.bias)?;
    let packet = metastable_packet(grid, &j, c.mass, c.hbar)?;
    let h = GridHamiltonian::new(grid, &j, c.mass, c.hbar);
    let l = grid.spacing();
    let pairs = lowest_eigenpairs(&h, SPECTRUM_STATES.min(grid.n_points));
    let rows = pairs.iter().enumerate().map(|(n, p)| {
        let overlap: f64 = p.vector.iter().zip(&packet.field.re).map(|(a, b)| a * b).sum();
        vec![n as f64, p.energy, (overlap * l).powi(2)]
    });
    write_csv(dir, "spectrum.csv", &["n", "energy", "weight"], rows, &mut r)?;
    let d = spectral_doublet(grid, &j, c.mass, c.hbar)?;
    let rows = grid
        .points()
        .enumerate()
        .map(|(k, x)| vec![x, d.lower.vector[k], d.upper.vector[k]]);
    write_csv(dir, "doublet.csv", &["x", "phi_d", "phi_u"], rows, &mut r)?;
    r.note(format!(
        "doublet states {:?}: E_d = {:?} meV, E_u = {:?} meV, Delta = {:?} meV, hbar*pi/Delta = {:?} ps, weights {:?}",
        d.indices,
        d.e_d,
        d.e_u,
        d.delta,
        d.transfer_time(c.hbar),
        d.weights
    ));
    Ok(r)
}

fn qc_frame(config: &RunConfig) -> Result<(qco_core::model::QuarticPotential, ReferenceFrame)> {
    let vpol = config.vpol()?;
    let c = config.consts();
    let frame = match config.qc.omega0 {
        Some(w) => ReferenceFrame::new(find_extrema(&vpol)?.x_meta, w, &c)?,
        None => curvature_frame(&vpol, &c)?,
    };
    Ok((vpol, frame))
}

const QC_HEADER: [&str; 7] = ["t", "x_c", "p_c", "v", "phi", "sigma_x2", "energy"];

fn qc_row(tr: &QcTrace, k: usize) -> Vec<f64> {
    vec![tr.times[k], tr.x_c[k], tr.p_c[k], tr.v[k], tr.phi[k], tr.sigma_x2[k], tr.energy[k]]
}

/// Variational orbit next to the exact packet started from the same Gaussian.
pub fn qc(config: &RunConfig, dir: &Path) -> Result<Report> {
    let mut r = Report::default();
    let c = config.consts();
    let (vpol, frame) = qc_frame(config)?;
    let x_start = config.qc.x_start.unwrap_or(frame.x0);
    let t_final = config.qc.t_final;
    let tr = evolve_qc(&GaussianState::at_rest(x_start), &frame, &vpol, t_final, &config.qc_config())?;
    let grid = config.grid_spec()?;
    let (psi, _) = gaussian_packet(grid, x_start, frame.c0())?;
    let prop = PropagatorConfig {
        output_stride: config.qc.output_stride,
        rho_boundary: Some(find_extrema(&vpol)?.x_barrier),
        snapshot_times: Vec::new(),
        kappa: None,
        ..config.propagator()
    };
    let exact = run_evolve(&psi, &vpol, &c, &prop, t_final)?;
    let n = tr.len().min(exact.trace.len());
    let mut header = QC_HEADER.to_vec();
    header.extend(["x_qco", "sigma_x2_qco"]);
    let rows = (0..n).map(|k| {
        let mut row = qc_row(&tr, k);
        row.extend([exact.trace.mean_x[k], exact.trace.sigma_x2[k]]);
        row
    });
    write_csv(dir, "qc.csv", &header, rows, &mut r)?;
    let early = (0..n)
        .filter(|&k| tr.times[k] < 2.0)
        .map(|k| (tr.x_c[k] - exact.trace.mean_x[k]).abs())
        .fold(0.0, f64::max);
    r.note(format!(
        "frame x0 = {:.4} A, omega0 = {:.6} 1/ps; start x_c = {x_start:.4} A; qc step {:e} ps, energy drift {:e}",
        frame.x0,
        frame.omega0,
        tr.dt,
        tr.max_relative_energy_drift()
    ));
    r.note(format!("max |x_c - x_qco| for t < 2 ps: {early:.4} A"));
    Ok(r)
}

/// `V_av(x, v)` at fixed phase.
pub fn qc_surface(config: &RunConfig, dir: &Path) -> Result<Report> {
    let mut r = Report::default();
    let (vpol, frame) = qc_frame(config)?;
    let q = &config.qc;
    let (nx, nv) = (q.surface_nx, q.surface_nv);
    let dx = (q.surface_x[1] - q.surface_x[0]) / (nx - 1) as f64;
    let dv = q.surface_v_max / (nv - 1) as f64;
    let mut rows = Vec::with_capacity(nx * nv);
    for iv in 0..nv {
        let v = iv as f64 * dv;
        let pot = EffectivePotential {
            vpol,
            frame,
            v,
            phi: q.surface_phi,
        };
        for ix in 0..nx {
            let x = q.surface_x[0] + ix as f64 * dx;
            rows.push(vec![x, v, pot.value(x)]);
        }
    }
    write_csv(dir, "surface.csv", &["x", "v", "V_av"], rows, &mut r)?;
    let flat = EffectivePotential {
        vpol,
        frame,
        v: 0.0,
        phi: q.surface_phi,
    };
    match find_extrema(&flat) {
        Ok(e) => r.note(format!(
            "V_av at v = 0: x = ({:.4}, {:.4}, {:.4}) A, V = ({:.4}, {:.4}, {:.4}) meV",
            e.x_meta, e.x_barrier, e.x_stable, e.v_meta, e.v_barrier, e.v_stable
        )),
        Err(e) => r.note(format!("V_av at v = 0: {e}")),
    }
    Ok(r)
}

/// Phase-plane orbit from the switching start, then the confinement edge by
/// bisection. A missing edge is reported, not treated as a failed run.
pub fn qc_switch(config: &RunConfig, dir: &Path) -> Result<Report> {
    let mut r = Report::default();
    let (vpol, frame) = qc_frame(config)?;
    let sw = config.switching_config();
    let x_b = find_extrema(&vpol)?.x_barrier;
    let start = config.qc.switch_start;
    let tr = evolve_qc(&GaussianState::at_rest(start), &frame, &vpol, sw.horizon, &sw.qc)?;
    write_csv(dir, "switch_orbit.csv", &QC_HEADER, (0..tr.len()).map(|k| qc_row(&tr, k)), &mut r)?;
    r.note(format!(
        "orbit from x_c = {start} A: {} (barrier at {x_b:.4} A)",
        classify_orbit(&tr, x_b, sw.settle).as_str()
    ));
    let [lo, hi] = config.qc.switch_range;
    match switching_scan((lo, hi), &frame, &vpol, &sw) {
        Ok(s) => {
            let text = format!(
                "threshold_x = {:?}\nthreshold_energy = {:?}\nconfined_x = {:?}\nescaping_x = {:?}\noutcome = {}\nvav_meta = {:?}\nvav_barrier = {:?}\n",
                s.threshold_x,
                s.threshold_energy,
                s.confined_x,
                s.escaping_x,
                s.outcome.as_str(),
                s.vav_meta,
                s.vav_barrier
            );
            write_text(dir, "switch_threshold.txt", &text, &mut r)?;
            r.note(format!(
                "confinement edge at x_c = {:.5} A, E_c = {:.4} meV",
                s.threshold_x, s.threshold_energy
            ));
        }
        Err(e) if e.category() == qco_core::ErrorCategory::PhysicsRegime => {
            r.note(format!("no confinement edge in [{lo}, {hi}]: {e}"));
        }
        Err(e) => return Err(e),
    }
    Ok(r)
}
