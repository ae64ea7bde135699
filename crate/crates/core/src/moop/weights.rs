//! Weight vectors of the min-max scalarization and sweeps over the simplex.

use crate::error::{invalid, Result, SwiptError};

const SUM_TOL: f64 = 1e-12;

/// Weights on the IR-EE, EH-EE and transmit-power objectives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightVector {
    ir_ee: f64,
    eh_ee: f64,
    power: f64,
}

impl WeightVector {
    pub fn new(ir_ee: f64, eh_ee: f64, power: f64) -> Result<Self> {
        for (name, v) in [("ir_ee", ir_ee), ("eh_ee", eh_ee), ("power", power)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(SwiptError::OutOfRange { name, value: v, lo: 0.0, hi: 1.0 });
            }
        }
        if (ir_ee + eh_ee + power - 1.0).abs() > SUM_TOL {
            return Err(invalid("weights", format!("sum to {}, not 1", ir_ee + eh_ee + power)));
        }
        Ok(Self { ir_ee, eh_ee, power })
    }

    /// The `j`-th unit vector, `j` in `0..3`.
    pub fn unit(j: usize) -> Result<Self> {
        match j {
            0 => Self::new(1.0, 0.0, 0.0),
            1 => Self::new(0.0, 1.0, 0.0),
            2 => Self::new(0.0, 0.0, 1.0),
            _ => Err(invalid("j", "objective index must be 0, 1 or 2")),
        }
    }

    pub fn ir_ee(&self) -> f64 {
        self.ir_ee
    }

    pub fn eh_ee(&self) -> f64 {
        self.eh_ee
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.ir_ee, self.eh_ee, self.power]
    }
}

fn grid_count(step: f64) -> Result<usize> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(invalid("step", format!("{step} is not in (0, 1]")));
    }
    let n = (1.0 / step).round();
    if (n * step - 1.0).abs() > 1e-9 {
        return Err(invalid("step", format!("{step} does not divide 1")));
    }
    Ok(n as usize)
}

/// Every weight vector on the simplex grid with spacing `step`, ordered by
/// the IR-EE weight and then the EH-EE weight.
pub fn sweep_weights(step: f64) -> Result<Vec<WeightVector>> {
    let n = grid_count(step)?;
    let mut out = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for i in 0..=n {
        for j in 0..=n - i {
            let k = n - i - j;
            let (a, b) = (i as f64 / n as f64, j as f64 / n as f64);
            // fix the last coordinate so that the sum is exact
            let c = if k == 0 { 0.0 } else { 1.0 - a - b };
            out.push(WeightVector::new(a, b, c.max(0.0))?);
        }
    }
    Ok(out)
}

/// Weights on the edge between two objectives, from all weight on `from` to
/// all weight on `to`.
pub fn edge_weights(from: usize, to: usize, step: f64) -> Result<Vec<WeightVector>> {
    if from > 2 || to > 2 || from == to {
        return Err(invalid("edge", "needs two distinct objective indices below 3"));
    }
    let n = grid_count(step)?;
    (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let mut w = [0.0; 3];
            w[to] = t;
            w[from] = if i == n { 0.0 } else { 1.0 - t };
            WeightVector::new(w[0], w[1], w[2])
        })
        .collect()
}

/// Boundary path from the power weight to the IR-EE weight and on to the
/// EH-EE weight. Along it the realized transmit power grows monotonically.
pub fn boundary_path(step: f64) -> Result<Vec<WeightVector>> {
    let mut path = edge_weights(2, 0, step)?;
    path.extend(edge_weights(0, 1, step)?.into_iter().skip(1));
    Ok(path)
}
