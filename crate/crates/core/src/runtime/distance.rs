//! Branch distances for relational predicates.

use strsim::levenshtein;

use super::value::Value;
use crate::lang::ast::BinaryOp;

/// Offset added to failed ordering comparisons.
pub const K: f64 = 1.0;

/// Maps a raw distance into `[0, 1)`.
pub fn normalize(d: f64) -> f64 {
    d / (d + 1.0)
}

/// Keeps distances finite and strictly positive when the outcome does not
/// hold, so that zero stays reserved for "taken".
pub(crate) fn sanitize(d: f64) -> f64 {
    if !d.is_finite() {
        f64::MAX
    } else if d <= 0.0 {
        K
    } else {
        d
    }
}

/// Exact evaluation of a relational operator.
pub fn compare(op: BinaryOp, l: &Value, r: &Value) -> bool {
    use std::cmp::Ordering;
    let ord: Option<Ordering> = match (l, r) {
        (Value::Int(_) | Value::Long(_), Value::Int(_) | Value::Long(_)) => {
            Some(as_i64(l).cmp(&as_i64(r)))
        }
        (Value::Char(a), Value::Char(b)) => Some(a.cmp(b)),
        (Value::Str(a), Value::Str(b)) => {
            return match op {
                BinaryOp::Eq => a == b,
                BinaryOp::Ne => a != b,
                _ => false,
            }
        }
        (Value::Bool(a), Value::Bool(b)) => Some(a.cmp(b)),
        (Value::Obj(_) | Value::Null, Value::Obj(_) | Value::Null) => {
            let eq = l == r;
            return match op {
                BinaryOp::Eq => eq,
                BinaryOp::Ne => !eq,
                _ => false,
            };
        }
        _ => l.as_f64().zip(r.as_f64()).and_then(|(a, b)| a.partial_cmp(&b)),
    };
    match (op, ord) {
        (BinaryOp::Eq, Some(o)) => o == Ordering::Equal,
        (BinaryOp::Ne, Some(o)) => o != Ordering::Equal,
        (BinaryOp::Lt, Some(o)) => o == Ordering::Less,
        (BinaryOp::Le, Some(o)) => o != Ordering::Greater,
        (BinaryOp::Gt, Some(o)) => o == Ordering::Greater,
        (BinaryOp::Ge, Some(o)) => o != Ordering::Less,
        // NaN: every comparison except `!=` is false.
        (BinaryOp::Ne, None) => true,
        _ => false,
    }
}

fn as_i64(v: &Value) -> i64 {
    match v {
        Value::Int(x) => *x as i64,
        Value::Long(x) => *x,
        _ => 0,
    }
}

/// Distance between two operands of an equality test.
fn gap(l: &Value, r: &Value) -> f64 {
    match (l, r) {
        (Value::Int(_) | Value::Long(_), Value::Int(_) | Value::Long(_)) => {
            (as_i64(l) as i128 - as_i64(r) as i128).unsigned_abs() as f64
        }
        (Value::Str(a), Value::Str(b)) => levenshtein(a, b) as f64,
        _ => match (l.as_f64(), r.as_f64()) {
            (Some(a), Some(b)) => (a - b).abs(),
            _ => K,
        },
    }
}

/// Evaluates `l op r` and returns `(value, d_true, d_false)`: the distances
/// to making the predicate true and false respectively.
pub fn relational(op: BinaryOp, l: &Value, r: &Value) -> (bool, f64, f64) {
    let v = compare(op, l, r);
    let miss = |d: f64| sanitize(d);
    let (dt, df) = match op {
        BinaryOp::Eq => {
            if v {
                (0.0, K)
            } else {
                (miss(gap(l, r)), 0.0)
            }
        }
        BinaryOp::Ne => {
            if v {
                (0.0, miss(gap(l, r)))
            } else {
                (K, 0.0)
            }
        }
        _ => {
            let d = miss(gap(l, r) + K);
            if v {
                (0.0, d)
            } else {
                (d, 0.0)
            }
        }
    };
    (v, dt, df)
}

/// Distance of a single boolean-valued operand.
pub fn truth(v: bool) -> (f64, f64) {
    if v {
        (0.0, K)
    } else {
        (K, 0.0)
    }
}

/// Distance for a desired outcome of `lhs op rhs` on plain numbers.
pub fn branch_distance(op: BinaryOp, lhs: f64, rhs: f64, want: bool) -> f64 {
    let l = Value::Double(lhs);
    let r = Value::Double(rhs);
    let (_, dt, df) = relational(op, &l, &r);
    if want {
        dt
    } else {
        df
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::rc::Rc;

    #[test]
    fn table_examples() {
        assert_eq!(branch_distance(BinaryOp::Eq, 5.0, 5.0, true), 0.0);
        assert_eq!(branch_distance(BinaryOp::Eq, 3.0, 5.0, true), 2.0);
        assert_eq!(branch_distance(BinaryOp::Le, 7.0, 3.0, true), 5.0);
        assert_eq!(branch_distance(BinaryOp::Lt, 3.0, 3.0, true), 1.0);
        assert_eq!(branch_distance(BinaryOp::Ne, 3.0, 3.0, true), 1.0);
        assert_eq!(branch_distance(BinaryOp::Ne, 3.0, 5.0, false), 2.0);
    }

    #[test]
    fn normalize_points() {
        assert_eq!(normalize(0.0), 0.0);
        assert_eq!(normalize(1.0), 0.5);
        assert_eq!(normalize(3.0), 0.75);
    }

    #[test]
    fn strings_use_edit_distance() {
        let a = Value::Str(Rc::from("kitten"));
        let b = Value::Str(Rc::from("sitting"));
        assert_eq!(relational(BinaryOp::Eq, &a, &b), (false, 3.0, 0.0));
        assert_eq!(relational(BinaryOp::Ne, &a, &a.clone()), (false, 1.0, 0.0));
    }

    #[test]
    fn ints_compare_exactly_at_extremes() {
        let a = Value::Long(i64::MAX);
        let b = Value::Long(i64::MAX - 1);
        assert!(compare(BinaryOp::Gt, &a, &b));
        let (v, dt, _) = relational(BinaryOp::Eq, &Value::Long(i64::MIN), &Value::Long(i64::MAX));
        assert!(!v && dt.is_finite() && dt > 0.0);
    }

    #[test]
    fn nan_distances_stay_finite() {
        let n = Value::Double(f64::NAN);
        let (v, dt, df) = relational(BinaryOp::Lt, &n, &Value::Double(1.0));
        assert!(!v);
        assert!(dt.is_finite() && dt > 0.0);
        assert_eq!(df, 0.0);
    }

    #[test]
    fn zero_iff_outcome() {
        let ops = [
            BinaryOp::Eq,
            BinaryOp::Ne,
            BinaryOp::Lt,
            BinaryOp::Le,
            BinaryOp::Gt,
            BinaryOp::Ge,
        ];
        for op in ops {
            for a in -3..=3 {
                for b in -3..=3 {
                    let (v, dt, df) = relational(op, &Value::Int(a), &Value::Int(b));
                    assert_eq!(dt == 0.0, v, "{op:?} {a} {b}");
                    assert_eq!(df == 0.0, !v, "{op:?} {a} {b}");
                }
            }
        }
    }
}
