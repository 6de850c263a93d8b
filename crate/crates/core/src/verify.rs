//! Cross-checks between the closed form, the recursion, the slice engine and
//! the series oracle, as run by `geode oracle`.

use crate::geode::{geode_diagonal, geode_element, GeodeMemo};
use crate::hypercat::hyper_catalan;
use crate::series::{divide_by_s1, face_layer_count, series_solve, verify_geometric_zero};
use crate::typevec::{vectors_of_degree, TypeVector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, failure: Option<String>, checked: usize) -> Self {
        let passed = failure.is_none();
        CheckResult {
            name: name.into(),
            passed,
            detail: failure.unwrap_or_else(|| format!("{checked} checked")),
        }
    }
}

fn up_to(degree: u32) -> impl Iterator<Item = TypeVector> {
    (0..=degree).flat_map(vectors_of_degree)
}

/// Runs every series-oracle property at degree cap `degree`.
pub fn run_oracle_checks(degree: u32) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let s = series_solve(degree);

    let mut failure = None;
    let mut checked = 0;
    for m in up_to(degree) {
        checked += 1;
        let from_series = s.coefficient(m).expect("within cap");
        if from_series != hyper_catalan(m) {
            failure = Some(format!("coefficient of {m} is {from_series}"));
            break;
        }
    }
    out.push(CheckResult::new(
        format!("series coefficients equal closed form, |m| <= {degree}"),
        failure,
        checked,
    ));

    let zero = verify_geometric_zero(&s);
    out.push(CheckResult::new(
        format!("S is a zero of the geometric quintic through degree {degree}"),
        (!zero).then(|| "residual is non-zero".to_string()),
        1,
    ));

    if degree == 0 {
        return out;
    }
    let geode = match divide_by_s1(&s) {
        Ok(g) => {
            out.push(CheckResult::new(
                "S - 1 divides exactly by t2+t3+t4+t5",
                None,
                1,
            ));
            g
        }
        Err(e) => {
            out.push(CheckResult::new(
                "S - 1 divides exactly by t2+t3+t4+t5",
                Some(e.to_string()),
                1,
            ));
            return out;
        }
    };

    let mut memo = GeodeMemo::new();
    let mut failure = None;
    let mut checked = 0;
    for m in up_to(degree - 1) {
        checked += 1;
        let g = geode.coefficient(m).expect("within cap");
        let r = geode_element(m, &mut memo);
        if g != r {
            failure = Some(format!("G[{m}]: series {g}, recursion {r}"));
            break;
        }
    }
    out.push(CheckResult::new(
        format!("Geode series equals recursion, |m| <= {}", degree - 1),
        failure,
        checked,
    ));

    let mut failure = None;
    let mut checked = 0;
    for n in (0..).take_while(|&n| 4 * n < degree) {
        checked += 1;
        let m = TypeVector::new(n, n, n, n);
        let slice = geode_diagonal(n, |_| {});
        let series = geode.coefficient(m).expect("within cap");
        if slice != series {
            failure = Some(format!("H({n}): slices {slice}, series {series}"));
            break;
        }
    }
    out.push(CheckResult::new(
        "slice engine equals series on the diagonal",
        failure,
        checked,
    ));

    let mut failure = None;
    for f in 0..=degree {
        let layer: num_bigint::BigUint = vectors_of_degree(f)
            .into_iter()
            .map(|m| s.coefficient(m).expect("within cap"))
            .sum();
        if layer != face_layer_count(f) {
            failure = Some(format!("layer {f}: series {layer}"));
            break;
        }
    }
    out.push(CheckResult::new(
        format!("face layers equal direct sums, F <= {degree}"),
        failure,
        degree as usize + 1,
    ));
    out
}
