//! Preprocessing for the medical-cost and Adult-income CSV schemas.
//!
//! Threshold groups use `lower < value <= upper`.

use super::{GroupRule, PreprocessSpec};

/// Age cutoffs shared by both presets: young `<= 35`, middle `(35, 50]`, old `> 50`.
pub const AGE_CUTOFFS: (f64, f64) = (35.0, 50.0);
/// BMI cutoffs: underweight, healthy weight, overweight, obese.
pub const BMI_CUTOFFS: (f64, f64, f64) = (18.5, 25.0, 30.0);

fn age_groups() -> Vec<GroupRule> {
    let (a, b) = AGE_CUTOFFS;
    vec![
        GroupRule::threshold("young", "age", None, Some(a)),
        GroupRule::threshold("middle", "age", Some(a), Some(b)),
        GroupRule::threshold("old", "age", Some(b), None),
    ]
}

/// Columns `age,sex,bmi,children,smoker,region,charges`; label `charges`.
pub fn medical_cost() -> PreprocessSpec {
    let (u, h, o) = BMI_CUTOFFS;
    let mut groups = age_groups();
    groups.extend([
        GroupRule::threshold("underweight", "bmi", None, Some(u)),
        GroupRule::threshold("healthyweight", "bmi", Some(u), Some(h)),
        GroupRule::threshold("overweight", "bmi", Some(h), Some(o)),
        GroupRule::threshold("obese", "bmi", Some(o), None),
        GroupRule::category("smoker", "smoker", &["yes"]),
        GroupRule::category("non-smoker", "smoker", &["no"]),
        GroupRule::category("male", "sex", &["male"]),
        GroupRule::category("female", "sex", &["female"]),
    ]);
    PreprocessSpec {
        numeric: ["age", "bmi", "children"].map(String::from).to_vec(),
        categorical: ["sex", "smoker", "region"].map(String::from).to_vec(),
        label: "charges".into(),
        intercept: true,
        groups,
        append_group_indicators: true,
    }
}

/// Adult reconstruction schema with real-valued `income` as the label.
/// Education groups split on `education-num` (9 = high-school graduate).
pub fn adult_income() -> PreprocessSpec {
    let mut groups = age_groups();
    groups.extend([
        GroupRule::threshold("HighSchool&less", "education-num", None, Some(9.0)),
        GroupRule::threshold("College&more", "education-num", Some(9.0), None),
        GroupRule::category("Male", "sex", &["Male"]),
        GroupRule::category("Female", "sex", &["Female"]),
        GroupRule::category("White", "race", &["White"]),
        GroupRule::category("Asian-Pac-Islander", "race", &["Asian-Pac-Islander"]),
        GroupRule::category("Amer-Indian-Eskimo", "race", &["Amer-Indian-Eskimo"]),
        GroupRule::category("Other", "race", &["Other"]),
        GroupRule::category("Black", "race", &["Black"]),
    ]);
    PreprocessSpec {
        numeric: ["hours-per-week", "age", "capital-gain", "capital-loss", "education-num"]
            .map(String::from)
            .to_vec(),
        categorical: [
            "workclass",
            "education",
            "marital-status",
            "relationship",
            "race",
            "sex",
            "native-country",
            "occupation",
        ]
        .map(String::from)
        .to_vec(),
        label: "income".into(),
        intercept: true,
        groups,
        append_group_indicators: true,
    }
}

/// Re-ingests a CSV written by the synthetic generator.
pub fn synthetic_csv(dim: usize) -> PreprocessSpec {
    let mut groups: Vec<GroupRule> = super::SHAPES
        .iter()
        .map(|s| GroupRule::category(s, "shape", &[s]))
        .collect();
    groups.extend(super::COLORS.iter().map(|c| GroupRule::category(c, "color", &[c])));
    PreprocessSpec {
        numeric: (0..dim).map(|i| format!("f{i}")).collect(),
        categorical: Vec::new(),
        label: "label".into(),
        intercept: true,
        groups,
        append_group_indicators: true,
    }
}
