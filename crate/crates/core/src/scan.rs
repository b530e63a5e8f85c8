//! Exhaustive enumeration of curve models over small fields, reporting the
//! zeta data of every supersingular member in a stable order.

use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::CurveModel;
use crate::error::{Error, Result};
use crate::ff::{Fe, FieldCtx};
use crate::poly::Polynomial;
use crate::zeta::{is_supersingular, rk2_from_shape, weil_polynomial, ZetaOptions, ZetaResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelClass {
    /// y^2 + y = a x^5 + b x^3 + c x, a != 0.
    Char2,
    /// y^2 = f(x), f monic separable of degree 5.
    Deg5,
    /// y^2 = f(x), f monic separable of degree 6.
    Deg6,
}

impl FromStr for ModelClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<ModelClass> {
        match s {
            "char2" => Ok(ModelClass::Char2),
            "deg5" => Ok(ModelClass::Deg5),
            "deg6" => Ok(ModelClass::Deg6),
            _ => Err(Error::Parse(format!("unknown model class {s}"))),
        }
    }
}

/// Zeta report for one curve, as printed by the command-line tool.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveReport {
    pub curve: String,
    pub supersingular: bool,
    pub r: i128,
    pub s: i128,
    pub q: u128,
    pub weil: String,
    #[serde(rename = "J_order")]
    pub j_order: String,
    pub rk2: Option<u32>,
    pub shape: Option<String>,
    pub method: String,
}

impl CurveReport {
    pub fn new(curve: &CurveModel, z: &ZetaResult) -> CurveReport {
        CurveReport {
            curve: curve.to_string(),
            supersingular: true,
            r: z.weil.r,
            s: z.weil.s,
            q: z.weil.q,
            weil: z.weil.polynomial_string(),
            j_order: z.weil.j_order().to_string(),
            rk2: z.shape.as_ref().and_then(|s| rk2_from_shape(s).ok()),
            shape: z.shape.as_ref().map(|s| s.to_string()),
            method: z.method.as_str().to_string(),
        }
    }
}

/// Number of models in a class over k.
pub fn class_size(k: &FieldCtx, class: ModelClass) -> u128 {
    let q = k.q();
    match class {
        ModelClass::Char2 => (q - 1) * q * q,
        ModelClass::Deg5 => q.pow(5),
        ModelClass::Deg6 => q.pow(6),
    }
}

fn digits(mut i: u128, q: u128, len: usize) -> Vec<Fe> {
    (0..len)
        .map(|_| {
            let d = i % q;
            i /= q;
            Fe(d)
        })
        .collect()
}

/// The i-th model of the class, if it is a valid curve.
pub fn nth_model(k: &Arc<FieldCtx>, class: ModelClass, i: u128) -> Option<CurveModel> {
    let q = k.q();
    match class {
        ModelClass::Char2 => {
            let d = digits(i, q, 3);
            // a runs over nonzero elements
            let a = Fe(d[2].0 + 1);
            CurveModel::char2(k, a, d[1], d[0], Fe::ZERO).ok()
        }
        ModelClass::Deg5 | ModelClass::Deg6 => {
            let deg = if class == ModelClass::Deg5 { 5 } else { 6 };
            let mut c = digits(i, q, deg);
            c.push(k.one());
            CurveModel::odd(Polynomial::new(k.clone(), c)).ok()
        }
    }
}

/// Supersingular curves of the class, in enumeration order.
pub fn supersingular_models(k: &Arc<FieldCtx>, class: ModelClass, budget: u128) -> Result<Vec<CurveModel>> {
    check_class(k, class, budget)?;
    Ok((0..class_size(k, class))
        .into_par_iter()
        .filter_map(|i| nth_model(k, class, i).filter(is_supersingular))
        .collect())
}

fn check_class(k: &FieldCtx, class: ModelClass, budget: u128) -> Result<()> {
    match (class, k.p()) {
        (ModelClass::Char2, p) if p != 2 => {
            return Err(Error::WrongCharacteristic("char2 class needs p = 2".into()))
        }
        (ModelClass::Deg5 | ModelClass::Deg6, 2) => {
            return Err(Error::WrongCharacteristic("y^2 = f(x) classes need odd p".into()))
        }
        _ => {}
    }
    let size = class_size(k, class);
    if size > budget {
        return Err(Error::BudgetExceeded(format!("{size} models exceed the budget {budget}")));
    }
    Ok(())
}

/// Zeta reports for every supersingular model of the class.
pub fn scan(k: &Arc<FieldCtx>, class: ModelClass, opts: &ZetaOptions) -> Result<Vec<CurveReport>> {
    let models = supersingular_models(k, class, opts.budget)?;
    models
        .par_iter()
        .map(|c| weil_polynomial(c, opts).map(|z| CurveReport::new(c, &z)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char2_over_8_reports_all() {
        let k = FieldCtx::new(2, 3).unwrap();
        let reps = scan(&k, ModelClass::Char2, &ZetaOptions::default()).unwrap();
        assert_eq!(reps.len(), 448);
        assert_eq!(reps, scan(&k, ModelClass::Char2, &ZetaOptions::default()).unwrap());
    }

    #[test]
    fn deg5_over_3_only_passers() {
        let k = FieldCtx::new(3, 1).unwrap();
        let models = supersingular_models(&k, ModelClass::Deg5, 1 << 20).unwrap();
        assert!(!models.is_empty());
        assert!(models.iter().all(is_supersingular));
        let total = (0..class_size(&k, ModelClass::Deg5)).filter(|&i| nth_model(&k, ModelClass::Deg5, i).is_some()).count();
        assert!(models.len() < total);
    }

    #[test]
    fn budget_and_characteristic() {
        let k = FieldCtx::new(5, 2).unwrap();
        assert!(matches!(supersingular_models(&k, ModelClass::Deg6, 1000), Err(Error::BudgetExceeded(_))));
        assert!(matches!(supersingular_models(&k, ModelClass::Char2, 1 << 30), Err(Error::WrongCharacteristic(_))));
    }
}
