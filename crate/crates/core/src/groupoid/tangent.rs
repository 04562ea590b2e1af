use super::{Groupoid, StringChart};
use crate::smooth::SmoothMap;

/// The Whitney sum `⊕^k TG ⇉ ⊕^k TM`: every structure map is replaced by its
/// `k`-fold tangent lift. Coordinates are `(g, v₁, …, v_k)`.
pub fn whitney_sum(g: &Groupoid, k: usize) -> Groupoid {
    let n = g.arrows().dim();
    let w = n * (k + 1);
    let higher = (2..=g.max_level())
        .map(|p| {
            let sc = g.strings(p).expect("level within max_level");
            // (g₁, V₁, …, g_p, V_p) ↦ (g₁, …, g_p, v₁₁, …, v_p1, …, v_1k, …, v_pk)
            let mut idx: Vec<usize> = (0..p).flat_map(|j| j * w..j * w + n).collect();
            for s in 1..=k {
                idx.extend((0..p).flat_map(|j| j * w + s * n..j * w + (s + 1) * n));
            }
            StringChart {
                chart: sc.chart.tangent(k),
                prs: sc.prs.iter().map(|pr| pr.tangent(k)).collect(),
                join: sc.join.tangent(k).after(&SmoothMap::select(w * p, idx)),
            }
        })
        .collect();
    let name = if k == 1 {
        format!("T{}", g.name())
    } else {
        format!("⊕{k}T{}", g.name())
    };
    Groupoid::from_parts(
        name,
        g.arrows().tangent(k),
        g.objects().tangent(k),
        g.source().tangent(k),
        g.target().tangent(k),
        g.unit().tangent(k),
        g.inverse().tangent(k),
        g.mult().tangent(k),
        higher,
    )
    .expect("tangent lift preserves consistent dimensions")
}

/// The tangent groupoid `TG ⇉ TM`.
pub fn tangent_groupoid(g: &Groupoid) -> Groupoid {
    whitney_sum(g, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::zoo;

    #[test]
    fn tangent_multiplication_is_derivative() {
        let g = zoo::aff1();
        let tg = tangent_groupoid(&g);
        // d/dt (a(t), b(t))(c(t), d(t)) = (a'c + ac', a'd + ad' + b')
        let out = tg.multiply(&[2.0, 1.0, 0.5, -1.0], &[3.0, 4.0, 1.0, 2.0]).unwrap();
        assert_eq!(out, vec![6.0, 9.0, 0.5 * 3.0 + 2.0, 0.5 * 4.0 + 2.0 * 2.0 - 1.0]);
    }
}
