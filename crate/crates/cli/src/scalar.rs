use holodet::euler::{det_euler_truncated, EulerOptions};
use holodet::laplacian::TwistedLaplacian;
use holodet::linalg::OracleDet;
use holodet::quiver::FromRaw;
use holodet::{Complex64, Error, GaussianRational, IndeterminateSet, MultiPoly, Result, Scalar};
use serde_json::{json, Value};

/// Scalar types the front end can run, encode and compare.
pub trait CliScalar: OracleDet + FromRaw {
    const MODE: &'static str;

    /// Canonical text form.
    fn text(&self, syms: &IndeterminateSet) -> String;

    /// JSON form: a string for exact values, `{re, im}` for floats.
    fn encode(&self, syms: &IndeterminateSet) -> Value {
        Value::String(self.text(syms))
    }

    /// Distance between two values; zero means equal.
    fn discrepancy(a: &Self, b: &Self) -> f64;

    /// Largest discrepancy still counted as agreement.
    fn tolerance() -> f64 {
        0.0
    }

    fn euler_truncated(_: &TwistedLaplacian<Self>, _: &[f64], _: EulerOptions) -> Result<(Self, Value)> {
        Err(Error::Unsupported("euler-truncated requires --mode float".into()))
    }
}

fn format_float(x: f64) -> String {
    // shortest round-trip form, stable across runs
    format!("{x:?}")
}

impl CliScalar for Complex64 {
    const MODE: &'static str = "float";

    fn text(&self, _: &IndeterminateSet) -> String {
        if self.im == 0.0 {
            format_float(self.re)
        } else if self.im < 0.0 {
            format!("{}-{}i", format_float(self.re), format_float(-self.im))
        } else {
            format!("{}+{}i", format_float(self.re), format_float(self.im))
        }
    }

    fn encode(&self, _: &IndeterminateSet) -> Value {
        json!({ "re": self.re, "im": self.im })
    }

    fn discrepancy(a: &Self, b: &Self) -> f64 {
        (a - b).norm() / a.norm().max(b.norm()).max(1.0)
    }

    fn tolerance() -> f64 {
        1e-9
    }

    fn euler_truncated(l: &TwistedLaplacian<Self>, kappa: &[f64], opts: EulerOptions) -> Result<(Self, Value)> {
        let r = det_euler_truncated(l, kappa, opts)?;
        let extra = json!({
            "error_bound": r.error_bound,
            "max_len": r.max_len,
            "primes": r.primes,
            "tail": r.tail,
            "gamma": r.data.gamma,
        });
        Ok((r.value, extra))
    }
}

impl CliScalar for GaussianRational {
    const MODE: &'static str = "exact";

    fn text(&self, _: &IndeterminateSet) -> String {
        self.to_string()
    }

    fn discrepancy(a: &Self, b: &Self) -> f64 {
        if a == b {
            return 0.0;
        }
        (a.clone() - b.clone()).to_complex().map_or(f64::INFINITY, |z| z.norm().max(f64::MIN_POSITIVE))
    }
}

impl CliScalar for MultiPoly<GaussianRational> {
    const MODE: &'static str = "symbolic";

    fn text(&self, syms: &IndeterminateSet) -> String {
        self.display(syms, ToString::to_string)
    }

    /// Largest coefficient of the difference.
    fn discrepancy(a: &Self, b: &Self) -> f64 {
        let d = a.clone() - b.clone();
        d.terms()
            .map(|(_, c)| c.to_complex().map_or(f64::INFINITY, |z| z.norm().max(f64::MIN_POSITIVE)))
            .fold(0.0, f64::max)
    }
}
