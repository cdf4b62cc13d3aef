//! CSV serialization. Reals are written as the shortest decimal that parses
//! back to the same `f64`; missing values are empty fields.

use std::io::Write;
use std::path::Path;

use crate::evolve::{AveragedObservables, PhaseMap, Trajectory};
use crate::spectral::{DefectSolution, SpectralResult};
use crate::Result;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(out)
}

/// Header plus rows of already-formatted fields.
pub fn write_table<W: Write>(out: W, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table_file(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_table(std::io::BufWriter::new(file), header, rows)
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// `t, I_1 .. I_N`, optionally followed by `re_j, im_j` for every site.
pub fn trajectory_table(traj: &Trajectory, amplitudes: bool) -> (Vec<String>, Vec<Vec<String>>) {
    let n = traj.n_cells();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|c| format!("I_{c}")));
    if amplitudes {
        for j in 1..=2 * n {
            header.push(format!("re_{j}"));
            header.push(format!("im_{j}"));
        }
    }
    let rows = (0..traj.len())
        .map(|s| {
            let mut row = vec![fmt_f64(traj.times()[s])];
            row.extend(traj.intensities_at(s).into_iter().map(fmt_f64));
            if amplitudes {
                for z in traj.states()[s].amplitudes() {
                    row.push(fmt_f64(z.re));
                    row.push(fmt_f64(z.im));
                }
            }
            row
        })
        .collect();
    (header, rows)
}

/// `cell, i_bar, gamma_bar`.
pub fn averages_table(avg: &AveragedObservables) -> (Vec<String>, Vec<Vec<String>>) {
    let rows = avg
        .i_bar_cells
        .iter()
        .zip(&avg.gamma_bar_cells)
        .enumerate()
        .map(|(c, (i, g))| vec![(c + 1).to_string(), fmt_f64(*i), fmt_f64(*g)])
        .collect();
    (strings(&["cell", "i_bar", "gamma_bar"]), rows)
}

/// `t, cell_1 .. cell_N` with values in {0, 1}.
pub fn heatmap_table(map: &PhaseMap) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["t".to_string()];
    header.extend((1..=map.n_cells).map(|c| format!("cell_{c}")));
    let rows = map
        .rows()
        .zip(&map.times)
        .map(|(r, t)| {
            let mut row = vec![fmt_f64(*t)];
            row.extend(r.iter().map(|v| v.to_string()));
            row
        })
        .collect();
    (header, rows)
}

/// `index, energy, in_gap`.
pub fn spectrum_table(spec: &SpectralResult) -> (Vec<String>, Vec<Vec<String>>) {
    let rows = spec
        .eigenvalues
        .iter()
        .zip(&spec.in_gap)
        .enumerate()
        .map(|(k, (e, g))| vec![k.to_string(), fmt_f64(*e), u8::from(*g).to_string()])
        .collect();
    (strings(&["index", "energy", "in_gap"]), rows)
}

/// `quantity, value`.
pub fn defect_table(sol: &DefectSolution) -> (Vec<String>, Vec<Vec<String>>) {
    let entries: [(&str, Option<f64>); 18] = [
        ("kappa", Some(sol.kappa)),
        ("nu", Some(sol.nu)),
        ("gamma_d", Some(sol.gamma_d)),
        ("gamma_0", Some(sol.gamma_0)),
        ("kappa_d", Some(sol.kappa_d)),
        ("kappa_0", Some(sol.kappa_0)),
        ("r", Some(sol.r)),
        ("gamma_c", Some(sol.gamma_c)),
        ("a", sol.a),
        ("b", sol.b),
        ("e_d", sol.e_d),
        ("period", sol.period),
        ("norm_sq", sol.norm_sq),
        ("weight", sol.weight),
        ("gamma_s_c", sol.gamma_sc),
        ("gamma_0_c", sol.gamma_0c),
        ("kappa_s_c", sol.kappa_sc),
        ("kappa_0_c", sol.kappa_0c),
    ];
    let rows = entries
        .iter()
        .map(|(k, v)| vec![k.to_string(), fmt_opt(*v)])
        .collect();
    (strings(&["quantity", "value"]), rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 9.597_724_091_861_605, -0.0, 1e22] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_opt(None), "");
    }

    #[test]
    fn rfc4180_shape() {
        let mut buf = Vec::new();
        write_table(
            &mut buf,
            &strings(&["a", "b"]),
            &[vec!["1".into(), "x,y".into()], vec!["2".into(), String::new()]],
        )
        .unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\r\n1,\"x,y\"\r\n2,\r\n");
    }
}
