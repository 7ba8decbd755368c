//! Error shapes and array index helpers.

use std::fmt;

use thiserror::Error;

use crate::lee::{lee_sphere_offsets, lee_sphere_size};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ShapeSpec {
    Box {
        sides: Vec<usize>,
    },
    LeeSphere {
        dim: usize,
        radius: usize,
    },
    LeeSphereWeightLimited {
        dim: usize,
        radius: usize,
        max_weight: usize,
    },
    BoxWeightLimited {
        sides: Vec<usize>,
        max_weight: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse shape {0:?}")]
pub struct ShapeParseError(pub String);

impl ShapeSpec {
    /// Arbitrary clusters of at most `b` positions: they always fit in a
    /// Lee sphere of radius `floor(b/2)`.
    pub fn arbitrary(dim: usize, b: usize) -> ShapeSpec {
        ShapeSpec::LeeSphereWeightLimited {
            dim,
            radius: b / 2,
            max_weight: b,
        }
    }

    /// `Some(b)` if this is the shape produced by [`ShapeSpec::arbitrary`].
    pub fn arbitrary_size(&self) -> Option<usize> {
        match *self {
            ShapeSpec::LeeSphereWeightLimited {
                radius, max_weight, ..
            } if radius == max_weight / 2 => Some(max_weight),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ShapeSpec::Box { sides } | ShapeSpec::BoxWeightLimited { sides, .. } => sides.len(),
            ShapeSpec::LeeSphere { dim, .. } | ShapeSpec::LeeSphereWeightLimited { dim, .. } => {
                *dim
            }
        }
    }

    /// Number of cells, B.
    pub fn volume(&self) -> usize {
        match self {
            ShapeSpec::Box { sides } | ShapeSpec::BoxWeightLimited { sides, .. } => {
                sides.iter().product()
            }
            ShapeSpec::LeeSphere { dim, radius }
            | ShapeSpec::LeeSphereWeightLimited { dim, radius, .. } => {
                lee_sphere_size(*dim, *radius) as usize
            }
        }
    }

    pub fn max_weight(&self) -> Option<usize> {
        match self {
            ShapeSpec::LeeSphereWeightLimited { max_weight, .. }
            | ShapeSpec::BoxWeightLimited { max_weight, .. } => Some(*max_weight),
            _ => None,
        }
    }

    /// Largest cluster weight: the weight limit if any, else the volume.
    pub fn cluster_weight_bound(&self) -> usize {
        self.max_weight()
            .unwrap_or(self.volume())
            .min(self.volume())
    }

    /// The shape without its weight limit.
    pub fn base(&self) -> ShapeSpec {
        match self {
            ShapeSpec::BoxWeightLimited { sides, .. } => ShapeSpec::Box {
                sides: sides.clone(),
            },
            ShapeSpec::LeeSphereWeightLimited { dim, radius, .. } => ShapeSpec::LeeSphere {
                dim: *dim,
                radius: *radius,
            },
            other => other.clone(),
        }
    }

    pub fn box_sides(&self) -> Option<&[usize]> {
        match self {
            ShapeSpec::Box { sides } | ShapeSpec::BoxWeightLimited { sides, .. } => Some(sides),
            _ => None,
        }
    }

    pub fn lee_radius(&self) -> Option<usize> {
        match self {
            ShapeSpec::LeeSphere { radius, .. }
            | ShapeSpec::LeeSphereWeightLimited { radius, .. } => Some(*radius),
            _ => None,
        }
    }

    /// Cell offsets of one placement. Boxes are anchored at their lowest
    /// corner, spheres at their center.
    pub fn cells(&self) -> Vec<Vec<i64>> {
        match self {
            ShapeSpec::Box { sides } | ShapeSpec::BoxWeightLimited { sides, .. } => grid(sides)
                .map(|c| c.iter().map(|&x| x as i64).collect())
                .collect(),
            ShapeSpec::LeeSphere { dim, radius }
            | ShapeSpec::LeeSphereWeightLimited { dim, radius, .. } => {
                lee_sphere_offsets(*dim, *radius)
            }
        }
    }

    /// Parses `box:3x3`, `box:3x3:t=2`, `lee:R`, `lee:R:t=T` or `arb:b`;
    /// spheres take their dimension from `dim` unless `:d=D` is given.
    pub fn parse(s: &str, dim: Option<usize>) -> Result<ShapeSpec, ShapeParseError> {
        let err = || ShapeParseError(s.to_string());
        let mut parts = s.trim().split(':');
        let kind = parts.next().ok_or_else(err)?;
        let main = parts.next().ok_or_else(err)?;
        let mut t = None;
        let mut d = dim;
        for extra in parts {
            let (k, v) = extra.split_once('=').ok_or_else(err)?;
            let v: usize = v.parse().map_err(|_| err())?;
            match k {
                "t" => t = Some(v),
                "d" => d = Some(v),
                _ => return Err(err()),
            }
        }
        let shape = match kind {
            "box" => {
                let sides: Vec<usize> = main
                    .split('x')
                    .map(|x| x.parse().map_err(|_| err()))
                    .collect::<Result<_, _>>()?;
                if sides.is_empty() || sides.contains(&0) {
                    return Err(err());
                }
                match t {
                    Some(max_weight) => ShapeSpec::BoxWeightLimited { sides, max_weight },
                    None => ShapeSpec::Box { sides },
                }
            }
            "lee" => {
                let radius = main.parse().map_err(|_| err())?;
                let dim = d.ok_or_else(err)?;
                match t {
                    Some(max_weight) => ShapeSpec::LeeSphereWeightLimited {
                        dim,
                        radius,
                        max_weight,
                    },
                    None => ShapeSpec::LeeSphere { dim, radius },
                }
            }
            "arb" => {
                if t.is_some() {
                    return Err(err());
                }
                let b: usize = main.parse().map_err(|_| err())?;
                if b == 0 {
                    return Err(err());
                }
                ShapeSpec::arbitrary(d.ok_or_else(err)?, b)
            }
            _ => return Err(err()),
        };
        if shape.dim() == 0
            || dim.is_some_and(|d| d != shape.dim())
            || shape.max_weight() == Some(0)
        {
            return Err(err());
        }
        Ok(shape)
    }
}

impl fmt::Display for ShapeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sides = |s: &[usize]| {
            s.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join("x")
        };
        match self {
            ShapeSpec::Box { sides: s } => write!(f, "box:{}", sides(s)),
            ShapeSpec::BoxWeightLimited {
                sides: s,
                max_weight,
            } => write!(f, "box:{}:t={max_weight}", sides(s)),
            ShapeSpec::LeeSphere { dim, radius } => write!(f, "lee:{radius}:d={dim}"),
            ShapeSpec::LeeSphereWeightLimited {
                dim,
                radius,
                max_weight,
            } => match self.arbitrary_size() {
                Some(b) => write!(f, "arb:{b}:d={dim}"),
                None => write!(f, "lee:{radius}:d={dim}:t={max_weight}"),
            },
        }
    }
}

/// All index vectors of `[0, dims[0]) x ... x [0, dims[D-1])` in row-major order.
pub fn grid(dims: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = if dims.is_empty() {
        0
    } else {
        dims.iter().product()
    };
    (0..total).map(move |flat| unflatten(flat, dims))
}

pub fn flatten(index: &[usize], dims: &[usize]) -> usize {
    index.iter().zip(dims).fold(0, |acc, (&i, &n)| acc * n + i)
}

pub fn unflatten(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = flat % dims[k];
        flat /= dims[k];
    }
    out
}

/// `Some(flat index)` if the signed index lies inside the array.
pub fn flat_if_inside(index: &[i64], dims: &[usize]) -> Option<usize> {
    let mut flat = 0usize;
    for (&i, &n) in index.iter().zip(dims) {
        if i < 0 || i as usize >= n {
            return None;
        }
        flat = flat * n + i as usize;
    }
    Some(flat)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for (text, dim, shape) in [
            ("box:3x3", None, ShapeSpec::Box { sides: vec![3, 3] }),
            (
                "box:2x2:t=2",
                None,
                ShapeSpec::BoxWeightLimited {
                    sides: vec![2, 2],
                    max_weight: 2,
                },
            ),
            ("lee:1", Some(2), ShapeSpec::LeeSphere { dim: 2, radius: 1 }),
            ("arb:3", Some(2), ShapeSpec::arbitrary(2, 3)),
            (
                "lee:2:t=3",
                Some(2),
                ShapeSpec::LeeSphereWeightLimited {
                    dim: 2,
                    radius: 2,
                    max_weight: 3,
                },
            ),
        ] {
            let parsed = ShapeSpec::parse(text, dim).unwrap();
            assert_eq!(parsed, shape);
            assert_eq!(ShapeSpec::parse(&parsed.to_string(), None).unwrap(), shape);
        }
        assert!(ShapeSpec::parse("lee:1", None).is_err());
        assert!(ShapeSpec::parse("box:3x0", None).is_err());
        assert!(ShapeSpec::parse("box:3x3", Some(3)).is_err());
        assert!(ShapeSpec::parse("disk:3", Some(2)).is_err());
    }

    #[test]
    fn volumes() {
        assert_eq!(ShapeSpec::Box { sides: vec![3, 3] }.volume(), 9);
        assert_eq!(ShapeSpec::LeeSphere { dim: 2, radius: 2 }.volume(), 13);
        assert_eq!(ShapeSpec::arbitrary(2, 3).volume(), 5);
        assert_eq!(ShapeSpec::arbitrary(2, 3).cluster_weight_bound(), 3);
    }

    #[test]
    fn flat_indices() {
        let dims = [3, 4, 5];
        for (k, idx) in grid(&dims).enumerate() {
            assert_eq!(flatten(&idx, &dims), k);
            assert_eq!(unflatten(k, &dims), idx);
        }
        assert_eq!(flat_if_inside(&[1, -1, 0], &dims), None);
        assert_eq!(flat_if_inside(&[2, 3, 4], &dims), Some(59));
    }
}
