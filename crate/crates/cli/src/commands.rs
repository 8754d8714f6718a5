use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use serde_json::{Map, Number, Value};

use halphen_core::connections::{
    affine_curvature, e2_affine_check, klein_invariant_connection, serre_derivative,
    wirtinger_connection, Sl2z,
};
use halphen_core::dynamics::{integrate as run_integrator, IntegratorConfig, System, Trajectory};
use halphen_core::elliptic::{elliptic_constants, theta_char_jet, wp, wp_prime, ThetaChar};
use halphen_core::frobenius::{eta, FlatPoint, Frobenius};
use halphen_core::json::{self, complex, complex_list};
use halphen_core::qseries::{eisenstein, rat};
use halphen_core::verify::{self, Suite, VerifyConfig};
use halphen_core::Error;

use crate::{
    ConnectionsArgs, EvalArgs, EvalFn, Format, FrobeniusArgs, Global, IntegrateArgs, Output,
    SeriesArgs, SystemName, VerifyArgs,
};

pub enum Failure {
    /// Bad arguments that clap cannot catch.
    Usage(String),
    Core(Error),
    /// A computation failed but produced a report worth printing.
    Reported(Output),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CmdResult = Result<Output, Failure>;

fn render(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn emit(g: &Global, kind: &str, fields: Map<String, Value>, text: String, ok: bool) -> Output {
    let text = if g.json { render(&json::envelope(kind, fields)) } else { text };
    Output { text, ok }
}

fn integer(s: &str) -> Value {
    Number::from_str(s).map(Value::Number).unwrap_or_else(|_| Value::String(s.to_string()))
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.16e} {:+.16e}i", z.re, z.im)
}

fn matrix_json(m: &halphen_core::frobenius::Matrix3C) -> Value {
    Value::Array(
        (0..3)
            .map(|i| complex_list(&[m[(i, 0)], m[(i, 1)], m[(i, 2)]]))
            .collect(),
    )
}

pub fn series(g: &Global, a: &SeriesArgs) -> CmdResult {
    let s = eisenstein(a.name.weight(), g.order)?;
    let name = format!("{:?}", a.name);
    if a.format == Format::Json || g.json {
        let rows = s
            .rows()
            .into_iter()
            .map(|(n, num, den)| {
                let mut m = Map::new();
                m.insert("n".into(), Value::from(n));
                m.insert("num".into(), integer(&num.to_string()));
                m.insert("den".into(), integer(&den.to_string()));
                Value::Object(m)
            })
            .collect();
        let mut f = Map::new();
        f.insert("name".into(), Value::from(name));
        f.insert("order".into(), Value::from(g.order));
        f.insert("coefficients".into(), Value::Array(rows));
        return Ok(Output { text: render(&json::envelope("series", f)), ok: true });
    }
    Ok(Output { text: s.to_csv(), ok: true })
}

pub fn eval(g: &Global, a: &EvalArgs) -> CmdResult {
    let tau = a.tau;
    let mut f = Map::new();
    f.insert("tau".into(), complex(tau));
    let text;
    match a.function {
        EvalFn::Theta => {
            let ch = ThetaChar::new(a.characteristic.0, a.characteristic.1)?;
            let z = a.z.unwrap_or_default();
            let jet = theta_char_jet(ch, z, tau, g.tol)?;
            f.insert("function".into(), Value::from("theta"));
            f.insert("characteristic".into(), Value::from(vec![ch.eps(), ch.delta()]));
            f.insert("z".into(), complex(z));
            f.insert("value".into(), complex(jet.value));
            f.insert("d1".into(), complex(jet.d1));
            f.insert("d2".into(), complex(jet.d2));
            text = format!("theta{ch}({}) = {}\n", fmt_c(z), fmt_c(jet.value));
        }
        EvalFn::Wp => {
            let z = a.z.ok_or_else(|| Failure::Usage("--fn wp needs --z".into()))?;
            let p = wp(z, tau, g.tol)?;
            let dp = wp_prime(z, tau, g.tol)?;
            f.insert("function".into(), Value::from("wp"));
            f.insert("z".into(), complex(z));
            f.insert("value".into(), complex(p));
            f.insert("derivative".into(), complex(dp));
            text = format!("wp = {}\nwp' = {}\n", fmt_c(p), fmt_c(dp));
        }
        EvalFn::Ek | EvalFn::Eta1 => {
            let ec = elliptic_constants(tau)?;
            if a.function == EvalFn::Ek {
                f.insert("function".into(), Value::from("ek"));
                f.insert("e".into(), complex_list(&ec.e));
                f.insert("g2".into(), complex(ec.g2));
                f.insert("g3".into(), complex(ec.g3));
                text = ec
                    .e
                    .iter()
                    .enumerate()
                    .map(|(k, e)| format!("e{} = {}\n", k + 1, fmt_c(*e)))
                    .collect();
            } else {
                f.insert("function".into(), Value::from("eta1"));
                f.insert("value".into(), complex(ec.eta1));
                text = format!("eta1 = {}\n", fmt_c(ec.eta1));
            }
        }
        EvalFn::E2 | EvalFn::E4 | EvalFn::E6 => {
            let w = match a.function {
                EvalFn::E2 => 2,
                EvalFn::E4 => 4,
                _ => 6,
            };
            let ev = eisenstein(w, g.order)?.eval(tau)?;
            f.insert("function".into(), Value::from(format!("E{w}")));
            f.insert("order".into(), Value::from(g.order));
            f.insert("value".into(), complex(ev.value));
            f.insert("tail_bound".into(), json::float(ev.tail_bound));
            text = format!("E{w} = {}  (tail <= {:.3e})\n", fmt_c(ev.value), ev.tail_bound);
        }
    }
    Ok(emit(g, "eval", f, text, true))
}

fn system_of(name: SystemName) -> System {
    match name {
        SystemName::Ramanujan => System::Ramanujan,
        SystemName::Rescaled => System::Rescaled,
        SystemName::Halphen => System::Halphen,
        SystemName::Chazy => System::Chazy,
        SystemName::Lifted => System::Lifted,
    }
}

fn parse_init(text: &str, dim: usize) -> Result<Vec<Complex64>, Failure> {
    let v: Value = serde_json::from_str(text).map_err(|e| Failure::Usage(format!("--init: {e}")))?;
    let items = v.as_array().ok_or_else(|| Failure::Usage("--init must be a JSON array".into()))?;
    let state: Option<Vec<Complex64>> = items.iter().map(json::parse_complex).collect();
    let state = state.ok_or_else(|| Failure::Usage("--init entries must be numbers, [re, im] or {\"re\", \"im\"}".into()))?;
    if state.len() != dim {
        return Err(Failure::Usage(format!("--init needs {dim} components, got {}", state.len())));
    }
    Ok(state)
}

fn sample_json(t: Complex64, state: &[Complex64]) -> Value {
    let mut m = Map::new();
    m.insert("t".into(), complex(t));
    m.insert("state".into(), complex_list(state));
    Value::Object(m)
}

pub fn integrate(g: &Global, a: &IntegrateArgs) -> CmdResult {
    let system = system_of(a.system);
    let (start, end) = if a.tau_path {
        (system.time_of(a.from), system.time_of(a.to))
    } else {
        (a.from, a.to)
    };
    let y0 = match (&a.init, a.tau_path) {
        (Some(text), _) => parse_init(text, system.dim())?,
        (None, true) => system.series_state(a.from, g.order)?,
        (None, false) => return Err(Failure::Usage("--init is required without --tau-path".into())),
    };
    let path: Vec<Complex64> = if start == end { vec![start] } else { vec![start, end] };
    let cfg = IntegratorConfig::with_tolerances(a.atol, a.rtol).with_env_overrides();

    let mut f = Map::new();
    f.insert("system".into(), Value::from(system.name()));
    f.insert("path".into(), complex_list(&path));
    f.insert("initial".into(), complex_list(&y0));

    let traj: Trajectory = match run_integrator(|y| system.eval(y), &y0, &path, &cfg) {
        Ok(t) => t,
        Err(Error::BlowUp { norm, at, last }) => {
            f.insert("status".into(), Value::from("blow_up"));
            f.insert("norm".into(), json::float(norm));
            f.insert("last_good".into(), sample_json(at, &last));
            let text = format!("blow-up (norm {norm:.3e}) after t = {}\n", fmt_c(at));
            return Err(Failure::Reported(emit(g, "integrate", f, text, false)));
        }
        Err(Error::MaxStepsExceeded { max_steps, at, last }) => {
            f.insert("status".into(), Value::from("max_steps_exceeded"));
            f.insert("max_steps".into(), Value::from(max_steps));
            f.insert("last_good".into(), sample_json(at, &last));
            let text = format!("step limit {max_steps} reached at t = {}\n", fmt_c(at));
            return Err(Failure::Reported(emit(g, "integrate", f, text, false)));
        }
        Err(e) => return Err(e.into()),
    };

    let last = traj.last();
    f.insert("status".into(), Value::from("ok"));
    f.insert("final".into(), sample_json(last.t, &last.state));
    f.insert("accepted".into(), Value::from(traj.accepted));
    f.insert("rejected".into(), Value::from(traj.rejected));
    f.insert("max_error".into(), json::float(traj.max_error()));
    let mut text = format!(
        "t = {}\n{}accepted {}, rejected {}\n",
        fmt_c(last.t),
        last.state.iter().enumerate().map(|(k, v)| format!("y{} = {}\n", k + 1, fmt_c(*v))).collect::<String>(),
        traj.accepted,
        traj.rejected
    );
    if a.tau_path && system != System::Lifted {
        let expected = system.series_state(a.to, g.order)?;
        let dev = expected.iter().zip(&last.state).map(|(e, y)| (e - y).norm()).fold(0.0, f64::max);
        f.insert("series_endpoint".into(), complex_list(&expected));
        f.insert("series_deviation".into(), json::float(dev));
        text.push_str(&format!("deviation from series at the endpoint: {dev:.3e}\n"));
    }
    if a.trace {
        let samples = traj.samples.iter().map(|s| sample_json(s.t, &s.state)).collect();
        f.insert("samples".into(), Value::Array(samples));
    }
    Ok(emit(g, "integrate", f, text, true))
}

pub fn frobenius(g: &Global, a: &FrobeniusArgs) -> CmdResult {
    let p = FlatPoint::new(a.t1, a.t2, a.t3)?;
    let model = Frobenius::new(g.order)?;
    let potential = model.potential(&p)?;
    let st = model.structure_constants(&p)?;
    let metric = model.intersection_form(&p)?;
    let cp = model.char_poly(&p)?;
    let canonical = model.canonical_coords(&p)?;
    let basis = model.change_of_basis(&p)?;

    let c_json = Value::Array(
        (0..3)
            .map(|i| {
                Value::Array(
                    (0..3)
                        .map(|j| complex_list(&[st.get(i, j, 0), st.get(i, j, 1), st.get(i, j, 2)]))
                        .collect(),
                )
            })
            .collect(),
    );
    let back_sub = canonical
        .u
        .iter()
        .map(|&u| cp.eval(u).norm() / cp.scale_at(u))
        .fold(0.0, f64::max);
    let mut residuals = Map::new();
    residuals.insert("associativity".into(), json::float(st.associativity_residual()));
    residuals.insert("unity".into(), json::float(st.unity_defect()));
    residuals.insert("char_poly_back_substitution".into(), json::float(back_sub));
    residuals.insert("jacobian_oracle".into(), json::float(basis.oracle_deviation));
    residuals.insert("printed_z_entry_deviation".into(), json::float(basis.literal_z_deviation));

    let mut f = Map::new();
    f.insert("point".into(), complex_list(&p.coords()));
    f.insert("F".into(), complex(potential));
    f.insert("C".into(), c_json);
    f.insert("eta".into(), matrix_json(&eta()));
    f.insert("g".into(), matrix_json(&metric));
    f.insert("charpoly".into(), complex_list(&cp.coeffs));
    f.insert("u".into(), complex_list(&canonical.u));
    f.insert("halphen_roots".into(), complex_list(&canonical.roots));
    f.insert("M".into(), matrix_json(&basis.matrix));
    f.insert("residuals".into(), Value::Object(residuals));

    let text = format!(
        "F = {}\n{}associativity residual {:.3e}\nchar poly back-substitution {:.3e}\nM vs Jacobian oracle {:.3e}\n",
        fmt_c(potential),
        canonical.u.iter().enumerate().map(|(k, u)| format!("u{} = {}\n", k + 1, fmt_c(*u))).collect::<String>(),
        st.associativity_residual(),
        back_sub,
        basis.oracle_deviation
    );
    Ok(emit(g, "frobenius", f, text, true))
}

pub fn connections(g: &Global, a: &ConnectionsArgs) -> CmdResult {
    let tau = a.tau;
    let ec = elliptic_constants(tau)?;
    let mut text = String::new();
    let mut wirtinger = Vec::new();
    for ch in ThetaChar::EVEN {
        let k = ch.half_period_index().unwrap_or(1);
        let w = wirtinger_connection(ch, tau)?;
        let expected = -6.0 * ec.e[k - 1];
        let mut m = Map::new();
        m.insert("characteristic".into(), Value::from(vec![ch.eps(), ch.delta()]));
        m.insert("value".into(), complex(w));
        m.insert("paired_root".into(), Value::from(format!("e{k}")));
        m.insert("expected".into(), complex(expected));
        wirtinger.push(Value::Object(m));
        text.push_str(&format!("wirtinger{ch} = {}  (-6 e{k} = {})\n", fmt_c(w), fmt_c(expected)));
    }
    let klein = klein_invariant_connection(tau)?;
    let curvature = affine_curvature(tau, g.order)?;
    let e4 = eisenstein(4, g.order)?.eval(tau)?.value;
    let e4s = eisenstein(4, g.order)?;
    let e6s = eisenstein(6, g.order)?;
    let serre_e4 = serre_derivative(2, &e4s)? == e6s.scale(&rat(-1, 3));
    let serre_e6 = serre_derivative(3, &e6s)? == (&e4s * &e4s).scale(&rat(-1, 2));

    let mut curv = Map::new();
    curv.insert("value".into(), complex(curvature));
    curv.insert("expected".into(), complex(PI * PI / 18.0 * e4));
    let mut serre = Map::new();
    serre.insert("serre_2_E4_equals_minus_E6_over_3".into(), Value::from(serre_e4));
    serre.insert("serre_3_E6_equals_minus_E4_squared_over_2".into(), Value::from(serre_e6));
    let mut e2 = Map::new();
    e2.insert("S".into(), json::float(e2_affine_check(Sl2z::S, tau)?));
    e2.insert("T".into(), json::float(e2_affine_check(Sl2z::T, tau)?));

    let mut f = Map::new();
    f.insert("tau".into(), complex(tau));
    f.insert("wirtinger".into(), Value::Array(wirtinger));
    f.insert("klein_invariant".into(), complex(klein));
    f.insert("curvature".into(), Value::Object(curv));
    f.insert("serre_checks".into(), Value::Object(serre));
    f.insert("e2_transformation_residuals".into(), Value::Object(e2));
    text.push_str(&format!("klein invariant = {}\n", fmt_c(klein)));
    text.push_str(&format!("curvature = {}  (pi^2 E4 / 18 = {})\n", fmt_c(curvature), fmt_c(PI * PI / 18.0 * e4)));
    text.push_str(&format!("serre(2, E4) = -E6/3: {serre_e4}\nserre(3, E6) = -E4^2/2: {serre_e6}\n"));
    Ok(emit(g, "connections", f, text, serre_e4 && serre_e6))
}

pub fn verify(g: &Global, a: &VerifyArgs) -> CmdResult {
    let suite = Suite::from_name(&a.suite)?;
    let cfg = VerifyConfig { order: g.order, tol: g.tol, tau: a.tau, timings: g.timings };
    let report = verify::run(suite, &cfg)?;
    let text = if g.json { render(&report.to_json()) } else { report.render_text() };
    Ok(Output { text, ok: report.passed() })
}
