use std::fs;
use std::path::Path;

use krein_core::krein::KreinEvaluator;
use krein_core::renorm::{finite_part_with_window, ExpansionShape, SampledBoundaryFunction};
use krein_core::schottky::{EnumerationConfig, GroupSpec, Orientation, SchottkyGroup};
use krein_core::specialfn::{weyl_leading_constant, weyl_polynomial, OddDimension, WeylForm};
use krein_core::zeta::{find_zeros, fredholm_det, EulerConfig, EulerProduct, Rect, ZeroSearch, CONVERGENCE_MARGIN};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{Cli, Command, KreinArgs};
use crate::output::{float, Artifact};
use crate::Failure;

/// Tolerance passed to δ estimation when a command needs δ.
const DELTA_TOL: f64 = 1e-10;

pub fn run(cli: &Cli) -> Result<Artifact, Failure> {
    let mut header = vec![
        ("krein", json!(env!("CARGO_PKG_VERSION"))),
        ("config", serde_json::to_value(cli).expect("config serializes")),
    ];
    let group = if cli.command.needs_group() {
        let path = cli
            .spec
            .as_deref()
            .ok_or_else(|| Failure::Usage("--spec is required".into()))?;
        let (spec, group) = load_group(path)?;
        header.push(("group", serde_json::to_value(spec).expect("spec serializes")));
        Some(group)
    } else {
        None
    };
    let group = || group.clone().expect("group loaded");

    match &cli.command {
        Command::Spectrum { l_max, orientation } => spectrum(header, &group(), *l_max, (*orientation).into()),
        Command::Delta { tol, nodes } => {
            let delta = group().estimate_delta_with_nodes(*tol, *nodes)?;
            let mut a = Artifact::csv(&header, &["delta"]);
            a.row(&[float(delta)]);
            Ok(a)
        }
        Command::Zeta { grid, l_max, nodes } => zeta(header, &group(), grid.as_deref(), *l_max, *nodes),
        Command::Resonances { rect, nodes, tol } => {
            let rect = parse_rect(rect)?;
            let zeros = find_zeros(&group(), rect, ZeroSearch::new(*nodes, *tol))?;
            json_artifact(&header, "zeros", &zeros)
        }
        Command::Xi {
            zmax,
            samples,
            paper_literal,
            krein,
        } => xi(header, group(), *zmax, *samples, form(*paper_literal), krein),
        Command::Dets {
            zmax,
            samples,
            m_half,
            krein,
        } => dets(header, group(), *zmax, *samples, *m_half, krein),
        Command::Detpk {
            k,
            contour_side,
            contour_radius,
            krein,
        } => {
            let (ev, header) = evaluator(header, group(), krein)?;
            let contour = ev.pk_contour(*k, *contour_radius, (*contour_side).into())?;
            json_artifact(&header, "det_pk", &ev.det_pk(*k, &contour)?)
        }
        Command::Weyl {
            tmax,
            samples,
            paper_literal,
            krein,
        } => {
            let (ev, header) = evaluator(header, group(), krein)?;
            json_artifact(&header, "weyl", &ev.weyl_check(*tmax, *samples, form(*paper_literal))?)
        }
        Command::Renorm {
            input,
            shape,
            weight,
            window,
        } => renorm(header, input, shape, *weight, *window),
    }
}

fn form(paper_literal: bool) -> WeylForm {
    if paper_literal {
        WeylForm::PaperLiteral
    } else {
        WeylForm::Squared
    }
}

fn json_artifact(header: &[(&str, Value)], key: &str, payload: &impl serde::Serialize) -> Result<Artifact, Failure> {
    Artifact::json(header, key, payload).map_err(|e| Failure::Io(e.to_string()))
}

/// Reads and builds the group; every failure names the offending field.
fn load_group(path: &Path) -> Result<(GroupSpec, SchottkyGroup), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Spec(format!("{}: {e}", path.display())))?;
    let spec = GroupSpec::from_json(&text).map_err(|e| Failure::Spec(e.to_string()))?;
    let field = match spec {
        GroupSpec::ThreeFunnel { .. } => "lengths",
        GroupSpec::Cylinder { .. } => "length",
        GroupSpec::Matrices { .. } => "generators",
    };
    let group = spec.build().map_err(|e| {
        let msg = e.to_string();
        // matrix specs already prefix the element index
        if msg.contains("generators[") || msg.contains("disks[") {
            Failure::Spec(format!("group spec: {msg}"))
        } else {
            Failure::Spec(format!("group spec field `{field}`: {msg}"))
        }
    })?;
    Ok((spec, group))
}

fn evaluator<'a>(
    mut header: Vec<(&'a str, Value)>,
    group: SchottkyGroup,
    args: &KreinArgs,
) -> Result<(KreinEvaluator, Vec<(&'a str, Value)>), Failure> {
    let ev = KreinEvaluator::new(group, args.config())?;
    header.push((
        "derived",
        json!({
            "delta": ev.delta(),
            "chi": ev.chi(),
            "zeta_route": if ev.uses_euler() { "euler" } else { "fredholm" },
            "euler_l_max": ev.euler_l_max(),
            "orientation": "oriented",
        }),
    ));
    Ok((ev, header))
}

fn spectrum(
    header: Vec<(&str, Value)>,
    group: &SchottkyGroup,
    l_max: f64,
    o: Orientation,
) -> Result<Artifact, Failure> {
    let entries = group.length_spectrum(&EnumerationConfig::new(l_max, o))?;
    let mut a = Artifact::csv(&header, &["word", "length", "multiplicity"]);
    for e in entries {
        a.row(&[e.word, float(e.length), e.multiplicity.to_string()]);
    }
    Ok(a)
}

/// `A:B:N` as `N` equally spaced points.
fn parse_axis(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Usage(format!("{what} must look like START:END:COUNT, got `{text}`"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts[..] else { return Err(bad()) };
    let (a, b): (f64, f64) = (
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    );
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    Ok(linspace(a, b, n))
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn parse_rect(text: &str) -> Result<Rect, Failure> {
    let bad = || Failure::Usage(format!("--rect must look like RE0:RE1,IM0:IM1, got `{text}`"));
    let nums: Vec<f64> = text
        .split([',', ':'])
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [r0, r1, i0, i1] = nums[..] else { return Err(bad()) };
    Rect::new(r0, r1, i0, i1).map_err(|e| Failure::Usage(format!("--rect: {e}")))
}

fn zeta(
    mut header: Vec<(&str, Value)>,
    group: &SchottkyGroup,
    grid: Option<&str>,
    l_max: f64,
    nodes: usize,
) -> Result<Artifact, Failure> {
    let delta = group.estimate_delta(DELTA_TOL)?;
    let (res, ims) = match grid {
        Some(g) => {
            let (re, im) = g
                .split_once(',')
                .ok_or_else(|| Failure::Usage(format!("--grid must look like RE0:RE1:N,IM0:IM1:M, got `{g}`")))?;
            (
                parse_axis(re, "--grid real axis")?,
                parse_axis(im, "--grid imaginary axis")?,
            )
        }
        None => (linspace(delta + 0.2, delta + 2.0, 5), linspace(-5.0, 5.0, 4)),
    };
    let lambdas: Vec<Complex64> = res
        .iter()
        .flat_map(|&re| ims.iter().map(move |&im| Complex64::new(re, im)))
        .collect();
    let euler = EulerProduct::with_delta(group, EulerConfig::new(l_max, Orientation::Oriented), delta)?;
    header.push((
        "derived",
        json!({"delta": delta, "orientation": "oriented", "classes": euler.class_count()}),
    ));

    let rows = lambdas
        .par_iter()
        .map(|&lambda| {
            let det = fredholm_det(group, lambda, nodes)?;
            let e = if lambda.re > delta + CONVERGENCE_MARGIN {
                Some(euler.log_z(lambda)?)
            } else {
                None
            };
            Ok((lambda, det, e))
        })
        .collect::<krein_core::Result<Vec<_>>>()?;

    let columns = [
        "re_lambda",
        "im_lambda",
        "re_logZ",
        "im_logZ",
        "route",
        "tail_bound",
        "discrepancy",
    ];
    let mut a = Artifact::csv(&header, &columns);
    for (lambda, det, e) in rows {
        let discrepancy = e.map(|e| (e.value.exp() - det).norm() / det.norm());
        let cell = |d: Option<f64>| d.map(float).unwrap_or_default();
        if let Some(e) = e {
            a.row(&[
                float(lambda.re),
                float(lambda.im),
                float(e.value.re),
                float(e.value.im),
                "euler".into(),
                float(e.tail_bound),
                cell(discrepancy),
            ]);
        }
        let log = det.ln();
        a.row(&[
            float(lambda.re),
            float(lambda.im),
            float(log.re),
            float(log.im),
            "fredholm".into(),
            String::new(),
            cell(discrepancy),
        ]);
    }
    Ok(a)
}

fn xi(
    header: Vec<(&str, Value)>,
    group: SchottkyGroup,
    zmax: f64,
    samples: usize,
    form: WeylForm,
    args: &KreinArgs,
) -> Result<Artifact, Failure> {
    if !(zmax > 0.0) || samples < 2 {
        return Err(Failure::Usage("xi needs --zmax > 0 and --samples ≥ 2".into()));
    }
    let (ev, header) = evaluator(header, group, args)?;
    let ts = linspace(0.0, zmax, samples);
    let xis = ev.xi_grid(&ts)?;
    let dxis = ts
        .par_iter()
        .map(|&t| ev.dxi(t))
        .collect::<krein_core::Result<Vec<_>>>()?;
    let n = OddDimension::ONE;
    let c = weyl_leading_constant(n, ev.chi());
    let w = weyl_polynomial(n, form);
    let mut a = Artifact::csv(&header, &["t", "xi", "dxi", "weyl_residual"]);
    for ((t, x), d) in ts.iter().zip(&xis).zip(&dxis) {
        a.row(&[float(*t), float(*x), float(d.value), float(x - c * w.eval(*t))]);
    }
    Ok(a)
}

fn dets(
    header: Vec<(&str, Value)>,
    group: SchottkyGroup,
    zmax: f64,
    samples: usize,
    m_half: Option<i64>,
    args: &KreinArgs,
) -> Result<Artifact, Failure> {
    if !(zmax > 0.0) || samples == 0 {
        return Err(Failure::Usage("dets needs --zmax > 0 and --samples ≥ 1".into()));
    }
    let (ev, mut header) = evaluator(header, group, args)?;
    let m = match m_half {
        Some(m) => m,
        None => ev.m_half()?,
    };
    header.push(("m_half", json!(m)));
    let zs: Vec<f64> = (1..=samples).map(|k| zmax * k as f64 / samples as f64).collect();
    let rows = zs
        .par_iter()
        .map(|&z| {
            let zc = Complex64::new(z, 0.0);
            let functional = ev.det_sx_functional(zc, &ev.default_contour(zc)?)?;
            let phase = ev.det_sx_phase(z, m)?;
            Ok((z, functional, phase))
        })
        .collect::<krein_core::Result<Vec<_>>>()?;
    let columns = [
        "z",
        "re_det",
        "im_det",
        "abs_det",
        "re_phase_route",
        "im_phase_route",
        "fe_residual",
    ];
    let mut a = Artifact::csv(&header, &columns);
    for (z, f, p) in rows {
        a.row(&[
            float(z),
            float(f.re),
            float(f.im),
            float(f.norm()),
            float(p.re),
            float(p.im),
            float((p - f).norm() / f.norm()),
        ]);
    }
    Ok(a)
}

fn parse_shape(text: &str) -> Result<ExpansionShape, Failure> {
    let terms = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            let (num, log) = match s.strip_suffix(['L', 'l']) {
                Some(rest) => (rest, true),
                None => (s, false),
            };
            num.parse::<f64>()
                .map(|e| (e, log))
                .map_err(|_| Failure::Usage(format!("--shape: cannot read exponent `{s}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ExpansionShape::new(&terms).map_err(|e| Failure::Usage(format!("--shape: {e}")))
}

fn read_samples(path: &Path) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    let input = |msg: String| Failure::Input(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| input(e.to_string()))?;
    let headers = reader.headers().map_err(|e| input(e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| input(format!("missing column `{name}`")))
    };
    let (ix, iu) = (column("x")?, column("u")?);
    let (mut xs, mut us) = (Vec::new(), Vec::new());
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| input(e.to_string()))?;
        let get = |i: usize, name: &str| {
            record
                .get(i)
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| input(format!("row {}: bad `{name}` value", line + 1)))
        };
        xs.push(get(ix, "x")?);
        us.push(get(iu, "u")?);
    }
    Ok((xs, us))
}

fn renorm(
    header: Vec<(&str, Value)>,
    input: &Path,
    shape: &str,
    weight: f64,
    window: f64,
) -> Result<Artifact, Failure> {
    let shape = parse_shape(shape)?;
    let (xs, us) = read_samples(input)?;
    let f = SampledBoundaryFunction::new(xs, us, shape).map_err(|e| Failure::Input(e.to_string()))?;
    let fp = finite_part_with_window(&f, weight, window)?;
    let columns = [
        "finite_part",
        "log_coefficient",
        "log_squared_coefficient",
        "fit_residual",
        "split",
        "window_samples",
    ];
    let mut header = header;
    header.push(("coefficients", json!(fp.coefficients)));
    let mut a = Artifact::csv(&header, &columns);
    a.row(&[
        float(fp.value),
        float(fp.log_coefficient),
        float(fp.log_squared_coefficient),
        float(fp.residual),
        float(fp.split),
        fp.window_samples.to_string(),
    ]);
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grids_and_shapes() {
        assert_eq!(parse_axis("0:1:3", "g").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_axis("0:1", "g").is_err());
        let r = parse_rect("-1:0.5,-2:2").unwrap();
        assert_eq!(r.center(), Complex64::new(-0.25, 0.0));
        let s = parse_shape("-2,-1L,0").unwrap();
        assert_eq!(s.terms().len(), 4);
        assert!(parse_shape("-2,x").is_err());
    }
}
