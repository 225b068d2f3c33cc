use std::fmt::Write as _;

use super::pipelines::{MatrixPayload, Payload};
use super::Report;
use crate::error::{Error, Result};
use crate::initial_data::FamilyInfo;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// aligned plain-text tables
    Human,
    /// pretty-printed JSON with stable key names
    Structured,
}

pub fn emit_report(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Human => Ok(emit_human(report)),
        Format::Structured => emit_structured(report),
    }
}

pub fn emit_structured(report: &Report) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Contract(format!("cannot serialise report: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Per-radius integrals of the mass pipeline, one row per sphere.
pub fn emit_csv(report: &Report) -> Option<String> {
    let m = report.mass_payload()?;
    let mut out = String::from("r");
    for nu in 0..4 {
        write!(out, ",E{nu}").unwrap();
    }
    for nu in 0..4 {
        for k in 1..=3 {
            write!(out, ",P{nu}{k}").unwrap();
        }
    }
    for nu in 0..4 {
        write!(out, ",beta{nu}").unwrap();
    }
    out.push('\n');
    for rec in &m.per_radius {
        write!(out, "{:e}", rec.r).unwrap();
        for v in rec.e.iter().chain(rec.p.iter().flatten()).chain(rec.beta.iter()) {
            write!(out, ",{v:e}").unwrap();
        }
        out.push('\n');
    }
    Some(out)
}

fn complex(re: f64, im: f64) -> String {
    format!("{re:+.6e}{im:+.6e}i")
}

fn matrix_block(out: &mut String, title: &str, m: &MatrixPayload) {
    writeln!(out, "{title}  verdict {}", m.verdict.label()).unwrap();
    for row in &m.entries {
        let cells: Vec<String> = row.iter().map(|z| format!("{:>28}", complex(z[0], z[1]))).collect();
        writeln!(out, "  {}", cells.join(" ")).unwrap();
    }
    let ev: Vec<String> = m.eigenvalues.iter().map(|x| format!("{x:+.8e}")).collect();
    writeln!(out, "  eigenvalues (ascending)  {}", ev.join("  ")).unwrap();
    let mi: Vec<String> = m.minors.iter().map(|x| format!("{x:+.8e}")).collect();
    writeln!(out, "  leading minors           {}", mi.join("  ")).unwrap();
    if let Some(c) = m.corollary_margin {
        writeln!(out, "  corollary margin         {c:+.8e}").unwrap();
    }
    if !m.chart_dependent.is_empty() {
        writeln!(out, "  chart-dependent entries  {}", m.chart_dependent.join(" ")).unwrap();
    }
}

pub fn emit_human(report: &Report) -> String {
    let mut out = String::new();
    let p = &report.provenance;
    writeln!(out, "{} {}  ({})", p.tool, p.version, report.format).unwrap();
    writeln!(out, "config sha256  {}", p.config_hash).unwrap();
    if let Some(f) = &p.family {
        let params: Vec<String> = f.params.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        writeln!(out, "family         {}  kappa = {}  tau = {}  {}", f.name, f.kappa, f.tau, params.join("  ")).unwrap();
    }
    writeln!(out, "seed           {}", p.config.seed).unwrap();
    writeln!(out).unwrap();
    if report.pipelines.is_empty() {
        writeln!(out, "no pipelines selected").unwrap();
        return out;
    }
    writeln!(out, "{:<20} {:<14} note", "pipeline", "status").unwrap();
    for r in &report.pipelines {
        writeln!(
            out,
            "{:<20} {:<14} {}",
            r.name.label(),
            r.status.label(),
            r.message.as_deref().unwrap_or("")
        )
        .unwrap();
    }
    writeln!(out, "\noverall        {}  (exit {})", report.status.label(), report.exit_code).unwrap();
    for r in &report.pipelines {
        match &r.payload {
            Payload::Clifford(c) => {
                writeln!(out, "\n[clifford]  {} pairs, exact = {}", c.pairs, c.exact).unwrap();
                writeln!(out, "  anticommutator defect {:.3e}  hermiticity defect {:.3e}  tolerance {:.1e}", c.anticommutator_defect, c.hermiticity_defect, c.tolerance).unwrap();
            }
            Payload::Killing(k) => {
                writeln!(out, "\n[killing]  {} points, tolerance {:.1e}", k.points, k.tolerance).unwrap();
                for v in &k.variants {
                    writeln!(out, "  {:<12} max residual {:.3e}  min Gram det {:.3e}", v.variant.label(), v.max_residual, v.min_gram_determinant).unwrap();
                }
            }
            Payload::Weitzenbock(w) => {
                writeln!(out, "\n[weitzenbock]  step {}  band [{}, {}]", w.step, w.ratio_band[0], w.ratio_band[1]).unwrap();
                writeln!(out, "  {:<12} {:>5} {:>14} {:>14} {:>8}", "variant", "field", "res(h)", "res(h/2)", "ratio").unwrap();
                for s in &w.samples {
                    let ratio = s.ratio.map_or("-".to_string(), |r| format!("{r:.4}"));
                    writeln!(out, "  {:<12} {:>5} {:>14.6e} {:>14.6e} {:>8}", s.variant.label(), s.field, s.residual_step, s.residual_half_step, ratio).unwrap();
                }
            }
            Payload::Decay(d) => {
                writeln!(out, "\n[decay]  tau = {}  admissible = {}  slope tolerance {}", d.tau, d.tau_admissible, d.slope_tolerance).unwrap();
                for q in &d.quantities {
                    writeln!(out, "  {:<10} log-slope {:+.4}  bounded {}", q.name, q.log_slope, q.bounded).unwrap();
                }
                if let Some(e) = &d.error {
                    writeln!(out, "  error: {e}").unwrap();
                }
            }
            Payload::EnergyConditions(e) => {
                writeln!(out, "\n[energy-conditions]  vacuum = {}", e.vacuum).unwrap();
                writeln!(out, "  identity defect {:.3e} over {} samples (tolerance {:.1e})", e.identity_max_defect, e.identity_samples, e.identity_tolerance).unwrap();
                writeln!(out, "  min μ − |ω̄| {:+.6e}  min ρ − |J| {:+.6e}  max |μ| {:.3e}  max |ω̄| {:.3e}", e.min_margin, e.min_margin_standard, e.max_abs_mu, e.max_omega).unwrap();
            }
            Payload::Mass(m) => {
                writeln!(out, "\n[mass]  normalization {}  sigma {:.4}  fit residual {:.3e} (tolerance {:.1e})", m.normalization.label(), m.fit.sigma, m.fit.max_relative_residual, m.fit.tolerance).unwrap();
                writeln!(out, "  {:>2} {:>16} {:>16} {:>16} {:>16} {:>16}", "nu", "E", "P_nu1", "P_nu2", "P_nu3", "beta").unwrap();
                for nu in 0..4 {
                    writeln!(out, "  {:>2} {:>+16.9e} {:>+16.9e} {:>+16.9e} {:>+16.9e} {:>+16.9e}", nu, m.e[nu], m.p[nu][0], m.p[nu][1], m.p[nu][2], m.beta[nu]).unwrap();
                }
                writeln!(out, "  E0 + P01 - |E + P1| = {:+.9e}", m.margin_energy_momentum).unwrap();
                writeln!(out, "  E0 - |E|            = {:+.9e}", m.margin_energy).unwrap();
                for g in &m.geometric_invariants {
                    writeln!(out, "  invariant (c1 = {}, c2 = {}) = {:+.9e}", g.c1, g.c2, g.value).unwrap();
                }
            }
            Payload::QMatrices(q) => {
                writeln!(out, "\n[q-matrices]  boundary form defect {:.3e} (tolerance {:.1e})", q.boundary_form_defect, q.tolerance).unwrap();
                matrix_block(&mut out, "Q1", &q.q1);
                matrix_block(&mut out, "Q", &q.q);
            }
            Payload::Rigidity(r) => {
                writeln!(out, "\n[rigidity]  zero mass = {}  embeds in AdS = {}", r.zero_mass, r.embeds_in_ads).unwrap();
                for v in &r.variants {
                    writeln!(out, "  {:<12} gauss {:.3e}  codazzi {:.3e}", v.variant.label(), v.max_gauss, v.max_codazzi).unwrap();
                }
            }
            Payload::None => {}
        }
    }
    out
}

pub fn families_human(families: &[FamilyInfo]) -> String {
    let mut out = String::new();
    for f in families {
        writeln!(out, "{}\n  {}", f.name, f.description).unwrap();
        for (k, d) in &f.params {
            writeln!(out, "    {k:<14} {d}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{run, Pipeline, RunConfig};

    #[test]
    fn structured_roundtrip_and_human_matrix() {
        let mut c = RunConfig::new("kottler", 1.0);
        c.pipelines = vec![Pipeline::Mass, Pipeline::QMatrices];
        let rep = run(&c).unwrap();
        let text = emit_structured(&rep).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rep);
        assert_eq!(emit_structured(&back).unwrap(), text);
        let human = emit_human(&rep);
        assert!(human.contains("eigenvalues (ascending)"));
        assert!(human.contains("Q1  verdict POSITIVE_DEFINITE"));
        let csv = emit_csv(&rep).unwrap();
        assert_eq!(csv.lines().count(), 1 + c.mass.radii.len());
        assert_eq!(csv.lines().next().unwrap().split(',').count(), 21);
    }
}
