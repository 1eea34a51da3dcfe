//! SVG rendering of first-level (and deeper) cylinder rectangles.

use crate::model::SpongeSystem;
use crate::rational::{rat_to_f64, Rat};
use num_traits::{One, Zero};
use std::fmt::Write;

#[derive(Debug, Clone, thiserror::Error)]
pub enum RenderError {
    #[error("rendering supports dimensions 2 and 3, got {0}")]
    UnsupportedDimension(usize),
    #[error("depth {0} yields too many rectangles")]
    DepthTooLarge(usize),
}

const VIEW: f64 = 1000.0;
const MAX_RECTS: usize = 65_536;

/// Depth-k cylinder rectangles. Planar carpets draw directly; three
/// dimensional sponges draw the three principal-plane projections side by
/// side. Corners stay exact until formatted.
pub fn render_svg(sys: &SpongeSystem, depth: usize) -> Result<String, RenderError> {
    let d = sys.dimension();
    if d != 2 && d != 3 {
        return Err(RenderError::UnsupportedDimension(d));
    }
    let rects = cylinder_boxes(sys, depth)?;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {VIEW} {VIEW}\" width=\"{VIEW}\" height=\"{VIEW}\">\n"
    ));
    svg.push_str("<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"white\"/>\n");
    if d == 2 {
        let panel = Panel { x0: 40.0, y0: 40.0, side: 920.0 };
        panel.frame(&mut svg);
        for b in &rects {
            panel.rect(&mut svg, &b[0], &b[1]);
        }
    } else {
        // three principal-plane projections of the boxes
        let planes = [(0usize, 1usize), (0, 2), (1, 2)];
        for (idx, &(cx, cy)) in planes.iter().enumerate() {
            let panel = Panel { x0: 20.0 + idx as f64 * 330.0, y0: 340.0, side: 300.0 };
            panel.frame(&mut svg);
            let _ = write!(
                svg,
                "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"24\">axes {}-{}</text>\n",
                panel.x0,
                panel.y0 - 12.0,
                cx + 1,
                cy + 1
            );
            for b in &rects {
                panel.rect(&mut svg, &b[cx], &b[cy]);
            }
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

struct Panel {
    x0: f64,
    y0: f64,
    side: f64,
}

impl Panel {
    fn frame(&self, svg: &mut String) {
        let _ = write!(
            svg,
            "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
            self.x0, self.y0, self.side, self.side
        );
    }

    fn rect(&self, svg: &mut String, x: &(Rat, Rat), y: &(Rat, Rat)) {
        let (tx, wx) = (rat_to_f64(&x.0), rat_to_f64(&x.1));
        let (ty, wy) = (rat_to_f64(&y.0), rat_to_f64(&y.1));
        let px = self.x0 + tx * self.side;
        // unit-square y axis points up, svg points down
        let py = self.y0 + (1.0 - ty - wy) * self.side;
        let _ = write!(
            svg,
            "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"#b08968\" fill-opacity=\"0.45\" stroke=\"#5e4632\" stroke-width=\"0.8\"/>\n",
            px,
            py,
            wx * self.side,
            wy * self.side
        );
    }
}

/// Exact (translation, width) intervals per coordinate of every depth-k
/// cylinder box.
fn cylinder_boxes(sys: &SpongeSystem, depth: usize) -> Result<Vec<Vec<(Rat, Rat)>>, RenderError> {
    let d = sys.dimension();
    let n = sys.map_count();
    let total = n.checked_pow(depth as u32).unwrap_or(usize::MAX);
    if depth == 0 || total > MAX_RECTS {
        return Err(RenderError::DepthTooLarge(depth));
    }
    let unit: Vec<(Rat, Rat)> = (0..d).map(|_| (Rat::zero(), Rat::one())).collect();
    let mut frontier = vec![unit];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * n);
        for parent in &frontier {
            for i in 0..n {
                let child: Vec<(Rat, Rat)> = (0..d)
                    .map(|c| {
                        let lam = sys.ratio(i, c);
                        let t = sys.translation(i, c);
                        (t + lam * &parent[c].0, lam * &parent[c].1)
                    })
                    .collect();
                next.push(child);
            }
        }
        frontier = next;
    }
    Ok(frontier)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AffineMapSpec, RawSponge};
    use crate::rational::rat;

    fn three_map_carpet() -> SpongeSystem {
        SpongeSystem::validate(&RawSponge {
            dimension: 2,
            maps: vec![
                AffineMapSpec::new(vec![rat(11, 20), rat(1, 4)], vec![rat(9, 20), rat(0, 1)]),
                AffineMapSpec::new(vec![rat(9, 20), rat(1, 2)], vec![rat(0, 1), rat(1, 4)]),
                AffineMapSpec::new(vec![rat(11, 20), rat(1, 4)], vec![rat(9, 20), rat(3, 4)]),
            ],
            weights: None,
        })
        .unwrap()
    }

    #[test]
    fn depth_one_draws_all_maps() {
        let svg = render_svg(&three_map_carpet(), 1).unwrap();
        assert_eq!(svg.matches("fill=\"#b08968\"").count(), 3);
        assert!(svg.starts_with("<svg"));
    }

    #[test]
    fn depth_two_squares_the_count() {
        let svg = render_svg(&three_map_carpet(), 2).unwrap();
        assert_eq!(svg.matches("fill=\"#b08968\"").count(), 9);
    }

    #[test]
    fn four_dimensional_input_is_rejected() {
        let sys = crate::words::tests::four_dim_two_map();
        assert!(matches!(
            render_svg(&sys, 1),
            Err(RenderError::UnsupportedDimension(4))
        ));
    }

    #[test]
    fn output_is_deterministic() {
        let a = render_svg(&three_map_carpet(), 2).unwrap();
        let b = render_svg(&three_map_carpet(), 2).unwrap();
        assert_eq!(a, b);
    }
}
