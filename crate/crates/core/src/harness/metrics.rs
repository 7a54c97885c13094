use crate::{Error, Result};

/// Measured flip fractions, one per current.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceDataset {
    /// (current in A, fraction) in file order.
    pub rows: Vec<(f64, f64)>,
}

impl ReferenceDataset {
    pub fn currents(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.0).collect()
    }
}

/// Coefficient of determination 1 - SS_res/SS_tot of `model` against
/// `data`. The model must contain every data current exactly.
pub fn r_squared(model: &[(f64, f64)], data: &ReferenceDataset) -> Result<f64> {
    if data.rows.len() < 2 {
        return Err(Error::domain("R² needs at least two data points"));
    }
    let mean = data.rows.iter().map(|r| r.1).sum::<f64>() / data.rows.len() as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for &(current, observed) in &data.rows {
        let predicted = model
            .iter()
            .find(|m| m.0 == current)
            .map(|m| m.1)
            .ok_or_else(|| Error::domain(format!("model has no value at {current} A")))?;
        ss_res += (observed - predicted).powi(2);
        ss_tot += (observed - mean).powi(2);
    }
    if ss_tot == 0.0 {
        return Err(Error::domain("R² is undefined for constant data"));
    }
    Ok(1.0 - ss_res / ss_tot)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> ReferenceDataset {
        ReferenceDataset {
            rows: vec![(0.01, 0.1), (0.1, 0.5), (0.3, 0.9)],
        }
    }

    #[test]
    fn perfect_model() {
        let d = data();
        assert_eq!(r_squared(&d.rows, &d).unwrap(), 1.0);
    }

    #[test]
    fn mean_model_scores_zero() {
        let d = data();
        let model: Vec<_> = d.currents().into_iter().map(|i| (i, 0.5)).collect();
        assert_eq!(r_squared(&model, &d).unwrap(), 0.0);
    }

    #[test]
    fn worked_three_point_case() {
        let model = vec![(0.01, 0.2), (0.1, 0.5), (0.3, 0.8)];
        let r2 = r_squared(&model, &data()).unwrap();
        assert!((r2 - 0.9375).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let one = ReferenceDataset {
            rows: vec![(0.1, 0.3)],
        };
        assert!(r_squared(&one.rows, &one).is_err());
        let model = vec![(0.01, 0.2), (0.3, 0.8)];
        assert!(r_squared(&model, &data()).is_err());
        let flat = ReferenceDataset {
            rows: vec![(0.1, 0.3), (0.2, 0.3)],
        };
        assert!(r_squared(&flat.rows, &flat).is_err());
    }

    #[test]
    fn extra_model_points_are_ignored() {
        let mut model = data().rows;
        model.push((0.05, 0.99));
        assert_eq!(r_squared(&model, &data()).unwrap(), 1.0);
    }
}
