use flexbayes::io::tsv;
use flexbayes::io::{density_plot, Grid, PlotSeries};
use flexbayes::synthetic::{hypothesis2_spec, sample, ATTRIBUTE_NAME};
use flexbayes::{Cell, Error};

fn series<'a>(all: &'a [PlotSeries<f64>], name: &str) -> &'a PlotSeries<f64> {
    all.iter().find(|s| s.name == name).unwrap()
}

fn trapezoid(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum()
}

fn strict_local_maxima(points: &[(f64, f64)]) -> usize {
    points.windows(3).filter(|w| w[1].1 > w[0].1 && w[1].1 > w[2].1).count()
}

#[test]
fn single_value_kernel_peaks_at_standard_normal_height() {
    let grid = Grid::new(-3.0, 3.0, 7).unwrap();
    let all = density_plot(&[0.0], &grid).unwrap();
    let kernel = series(&all, "kernel");
    let (x, y) = kernel
        .points
        .iter()
        .copied()
        .fold((f64::NAN, f64::NEG_INFINITY), |m, p| if p.1 > m.1 { p } else { m });
    assert_eq!(x, 0.0);
    assert!((y - 0.398_942_3).abs() < 1e-7, "{y}");
}

#[test]
fn series_are_normalized_on_a_wide_grid() {
    let values = [-1.3, -0.2, 0.0, 0.4, 0.45, 1.9, 2.2, 3.1];
    let sd = 1.5;
    let grid = Grid::new(-1.3 - 10.0 * sd, 3.1 + 10.0 * sd, 4001).unwrap();
    let all = density_plot(&values, &grid).unwrap();
    for name in ["gaussian", "kernel", "histogram"] {
        let area = trapezoid(&series(&all, name).points);
        assert!((area - 1.0).abs() < 0.01, "{name}: {area}");
    }
}

#[test]
fn x_is_strictly_increasing_in_every_series() {
    let grid = Grid::new(-2.0, 5.0, 50).unwrap();
    for s in density_plot(&[1.0, 2.0, 2.5], &grid).unwrap() {
        assert!(s.points.windows(2).all(|w| w[0].0 < w[1].0), "{}", s.name);
    }
}

#[test]
fn bimodal_sample_kernel_has_two_modes_gaussian_one() {
    // Class A of the second built-in domain (modes at -3 and 3, sigma 0.7),
    // scaled by 1/20 so the fixed 1/sqrt(n) kernel width (0.032) is close to
    // the component sigma (0.035) rather than a small fraction of it; at a
    // tenth of sigma the estimate resolves individual points.
    let data = sample(&hypothesis2_spec::<f64>(), 2000, 11);
    assert_eq!(data.schema().attribute(0).name, ATTRIBUTE_NAME);
    let values: Vec<f64> = data
        .instances()
        .iter()
        .filter(|i| i.label.as_deref() == Some("A"))
        .map(|i| match i.values[0] {
            Cell::Continuous(x) => 0.05 * x,
            _ => unreachable!(),
        })
        .take(1000)
        .collect();
    assert_eq!(values.len(), 1000);
    let grid = Grid::new(-0.4, 0.4, 161).unwrap();
    let all = density_plot(&values, &grid).unwrap();
    assert_eq!(strict_local_maxima(&series(&all, "gaussian").points), 1);
    assert_eq!(strict_local_maxima(&series(&all, "kernel").points), 2);
}

#[test]
fn invalid_requests_are_rejected() {
    assert!(matches!(
        density_plot::<f64>(&[], &Grid::new(0.0, 1.0, 2).unwrap()),
        Err(Error::NoObservations { .. })
    ));
    assert!(Grid::new(1.0, 0.0, 10).is_err());
    assert!(Grid::new(0.0, 1.0, 1).is_err());
}

#[test]
fn plot_table_layout() {
    let grid = Grid::new(0.0, 1.0, 3).unwrap();
    let text = tsv::plot_series(&density_plot(&[0.5], &grid).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "#series\tx\ty");
    assert_eq!(lines.len(), 1 + 3 * 3);
    assert!(lines[1].starts_with("gaussian\t0.000000\t"));
}
