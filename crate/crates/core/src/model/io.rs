//! JSON documents for instances and assortments. Document indices are 1-based.

use serde::{Deserialize, Serialize};

use super::{Assortment, Instance, PatienceModel, Placement, Product};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub m: usize,
    pub d: usize,
    pub w: usize,
    pub products: Vec<ProductDoc>,
    pub patience: PatienceDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductDoc {
    pub revenue: f64,
    pub cost: f64,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PatienceDoc {
    Exponential { rate: f64 },
    Deterministic { budget: f64 },
    Table { points: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssortmentDoc {
    pub placements: Vec<PlacementDoc>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementDoc {
    pub product: usize,
    pub exposure: usize,
    pub stage: usize,
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        Error::Parse { path, message: err.into_inner().to_string() }
    })
}

impl From<&PatienceModel> for PatienceDoc {
    fn from(p: &PatienceModel) -> Self {
        match p {
            PatienceModel::Exponential { rate } => PatienceDoc::Exponential { rate: *rate },
            PatienceModel::Deterministic { budget } => PatienceDoc::Deterministic { budget: *budget },
            PatienceModel::Table { points } => {
                PatienceDoc::Table { points: points.iter().map(|&(q, s)| [q, s]).collect() }
            }
        }
    }
}

impl From<PatienceDoc> for PatienceModel {
    fn from(p: PatienceDoc) -> Self {
        match p {
            PatienceDoc::Exponential { rate } => PatienceModel::Exponential { rate },
            PatienceDoc::Deterministic { budget } => PatienceModel::Deterministic { budget },
            PatienceDoc::Table { points } => {
                PatienceModel::Table { points: points.into_iter().map(|[q, s]| (q, s)).collect() }
            }
        }
    }
}

impl From<&Instance> for InstanceDoc {
    fn from(inst: &Instance) -> Self {
        InstanceDoc {
            m: inst.m(),
            d: inst.d(),
            w: inst.w(),
            products: inst
                .products()
                .iter()
                .map(|p| ProductDoc { revenue: p.revenue, cost: p.patience_cost, weights: p.weights.clone() })
                .collect(),
            patience: inst.patience().into(),
        }
    }
}

impl TryFrom<InstanceDoc> for Instance {
    type Error = Error;

    fn try_from(doc: InstanceDoc) -> Result<Self> {
        let products =
            doc.products.into_iter().map(|p| Product::new(p.revenue, p.cost, p.weights)).collect();
        Instance::new(products, doc.m, doc.d, doc.w, doc.patience.into())
    }
}

/// Parses and validates an instance document.
pub fn load_instance(text: &str) -> Result<Instance> {
    parse::<InstanceDoc>(text)?.try_into()
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceDoc::from(inst)).expect("instance documents always serialize")
}

/// Parses an assortment document against the dimensions of `inst`.
/// Feasibility is not checked here.
pub fn load_assortment(text: &str, inst: &Instance) -> Result<Assortment> {
    let doc: AssortmentDoc = parse(text)?;
    let mut placements = Vec::with_capacity(doc.placements.len());
    for (idx, p) in doc.placements.iter().enumerate() {
        if p.product == 0 || p.exposure == 0 || p.stage == 0 {
            return Err(Error::Parse {
                path: format!("placements[{idx}]"),
                message: "indices are 1-based".into(),
            });
        }
        placements.push(Placement { product: p.product - 1, exposure: p.exposure - 1, stage: p.stage - 1 });
    }
    Assortment::from_placements(inst.n(), inst.w(), inst.m(), &placements)
}

impl From<&Assortment> for AssortmentDoc {
    fn from(a: &Assortment) -> Self {
        AssortmentDoc {
            placements: a
                .placements()
                .into_iter()
                .map(|p| PlacementDoc { product: p.product + 1, exposure: p.exposure + 1, stage: p.stage + 1 })
                .collect(),
        }
    }
}

pub fn assortment_to_json(a: &Assortment) -> String {
    serde_json::to_string_pretty(&AssortmentDoc::from(a)).expect("assortment documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAIR: &str = r#"{
        "m": 2, "d": 1, "w": 1,
        "products": [
            {"revenue": 1.0, "cost": 1.0, "weights": [1.0]},
            {"revenue": 2.0, "cost": 1.0, "weights": [2.0]}
        ],
        "patience": {"kind": "exponential", "rate": 0.6931471805599453}
    }"#;

    #[test]
    fn loads_reference_instance() {
        let inst = load_instance(PAIR).unwrap();
        assert_eq!((inst.n(), inst.m(), inst.d(), inst.w()), (2, 2, 1, 1));
        let back = load_instance(&instance_to_json(&inst)).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn parse_error_has_field_path() {
        let bad = PAIR.replace("\"revenue\": 2.0", "\"revenue\": \"two\"");
        match load_instance(&bad) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "products[1].revenue"),
            other => panic!("unexpected {other:?}"),
        }
        let unknown = PAIR.replace("\"rate\"", "\"lambda\"");
        assert!(matches!(load_instance(&unknown), Err(Error::Parse { .. })));
    }

    #[test]
    fn validation_error_for_burnout() {
        let bad = PAIR.replace("\"w\": 1", "\"w\": 2").replace("[1.0]", "[1.0, 2.0]").replace("[2.0]", "[2.0, 1.0]");
        let err = load_instance(&bad).unwrap_err().to_string();
        assert!(err.contains("Assumption 2 violated at product 0, exposure 1"), "{err}");
    }

    #[test]
    fn table_document() {
        let doc = PAIR.replace(
            r#"{"kind": "exponential", "rate": 0.6931471805599453}"#,
            r#"{"kind": "table", "points": [[0, 1.0], [1, 0.9], [2, 0.5]]}"#,
        );
        let err = load_instance(&doc).unwrap_err().to_string();
        assert!(err.contains("Assumption 1 violated"), "{err}");
    }

    #[test]
    fn assortment_round_trip() {
        let inst = load_instance(PAIR).unwrap();
        let a = load_assortment(
            r#"{"placements": [{"product": 1, "exposure": 1, "stage": 1}, {"product": 2, "exposure": 1, "stage": 2}]}"#,
            &inst,
        )
        .unwrap();
        assert_eq!(a.placements().len(), 2);
        assert_eq!(load_assortment(&assortment_to_json(&a), &inst).unwrap(), a);
        assert!(load_assortment(r#"{"placements": [{"product": 0, "exposure": 1, "stage": 1}]}"#, &inst).is_err());
        assert!(matches!(
            load_assortment(r#"{"placements": [{"product": 3, "exposure": 1, "stage": 1}]}"#, &inst),
            Err(Error::Shape(_))
        ));
    }
}
