//! CSV dump formats.  All floating-point fields carry 17 significant digits
//! so dumps round-trip bit-exactly.

use std::io::{self, Write};

use crate::egup::EgupSpectrumRow;
use crate::grid::GridWaveFunction;
use crate::oscillator::SpectrumRow;

/// 17 significant digits (1 before the point, 16 after, exponent form).
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Wavefunction dump: `p,re,im`, one row per grid point.
pub fn write_wavefunction_csv(psi: &GridWaveFunction, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "p,re,im")?;
    for (j, p) in psi.grid().points().enumerate() {
        let z = psi.amplitudes()[j];
        writeln!(out, "{},{},{}", format_f64(p), format_f64(z.re), format_f64(z.im))?;
    }
    Ok(())
}

/// Oscillator spectrum dump: `n,E_n,E0_n,deltaE_paper,deltaE_numeric`.
pub fn write_spectrum_csv(rows: &[SpectrumRow], out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "n,E_n,E0_n,deltaE_paper,deltaE_numeric")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            format_f64(r.e_n),
            format_f64(r.e0_n),
            format_f64(r.delta_paper),
            format_f64(r.delta_numeric)
        )?;
    }
    Ok(())
}

/// q-oscillator spectrum dump: `n,E_n,E0_n,delta_paper,delta_numeric,q`.
pub fn write_egup_spectrum_csv(rows: &[EgupSpectrumRow], out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "n,E_n,E0_n,delta_paper,delta_numeric,q")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            format_f64(r.e_n),
            format_f64(r.e0_n),
            format_f64(r.delta_paper),
            format_f64(r.delta_numeric),
            format_f64(r.q)
        )?;
    }
    Ok(())
}

/// Wigner dump: `x,p,W` row-major over the x grid.
pub fn write_wigner_csv(
    field: &crate::wigner::PhaseSpaceField,
    out: &mut impl Write,
) -> io::Result<()> {
    writeln!(out, "x,p,W")?;
    for (ix, &x) in field.x_grid().iter().enumerate() {
        for (ip, &p) in field.p_grid().iter().enumerate() {
            writeln!(
                out,
                "{},{},{}",
                format_f64(x),
                format_f64(p),
                format_f64(field.value(ix, ip))
            )?;
        }
    }
    Ok(())
}

/// Gnuplot-compatible matrix: one row per x, columns over p, blank-line
/// separated blocks are unnecessary for `splot ... matrix`.
pub fn write_wigner_gnuplot_matrix(
    field: &crate::wigner::PhaseSpaceField,
    out: &mut impl Write,
) -> io::Result<()> {
    for ix in 0..field.x_grid().len() {
        let row: Vec<String> = (0..field.p_grid().len())
            .map(|ip| format_f64(field.value(ix, ip)))
            .collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::MomentumGrid;
    use crate::C64;

    #[test]
    fn float_format_has_17_significant_digits() {
        let s = format_f64(std::f64::consts::PI);
        assert_eq!(s, "3.1415926535897931e0");
        let back: f64 = s.parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn wavefunction_csv_round_trips() {
        let grid = MomentumGrid::symmetric(2.0, 16).unwrap();
        let psi = GridWaveFunction::from_fn(grid, |p| C64::new((-p * p).exp(), 0.1 * p));
        let mut buf = Vec::new();
        write_wavefunction_csv(&psi, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "p,re,im");
        for (j, line) in lines.enumerate() {
            let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
            assert_eq!(fields[0], grid.point(j));
            assert_eq!(fields[1], psi.amplitudes()[j].re);
            assert_eq!(fields[2], psi.amplitudes()[j].im);
        }
    }
}
