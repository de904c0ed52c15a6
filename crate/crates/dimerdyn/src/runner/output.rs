//! Deterministic file emission: fixed float formatting, LF line endings, no
//! timestamps — identical configs produce byte-identical outputs.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::observables::ObservableFrame;
use crate::wavepacket::WavepacketSlice;

/// 17-significant-digit scientific formatting; round-trips f64 exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub const FRAME_COLUMNS: &str = "t,Sz_exact,Sz_qhd,Sz_analytic,sigma_q,sigma_p,sum_vib,\
sigma_Sx,sigma_Sy,sum_el,E_vib_total,E_vib_cl,E_vib_q,E_el_total,E_el_cl,E_el_q,\
Rx,Ry,Rz,R2,fidelity,corr_beta";

/// One emitted CSV row: the exact frame plus the two closure inversions.
pub struct FrameRow<'a> {
    pub frame: &'a ObservableFrame,
    pub sz_exact: f64,
    pub sz_qhd: f64,
    pub sz_analytic: f64,
}

pub fn write_frames_csv(path: &Path, rows: &[FrameRow<'_>]) -> Result<()> {
    let mut out = String::new();
    out.push_str(FRAME_COLUMNS);
    out.push('\n');
    for row in rows {
        let f = row.frame;
        let cols = [
            f.t,
            row.sz_exact,
            row.sz_qhd,
            row.sz_analytic,
            f.sigma_q,
            f.sigma_p,
            f.sum_vib,
            f.sigma_sx,
            f.sigma_sy,
            f.sum_el,
            f.e_vib_total,
            f.e_vib_semicl,
            f.e_vib_quant,
            f.e_el_total,
            f.e_el_quasicl,
            f.e_el_quant,
            f.r_x,
            f.r_y,
            f.r_z,
            f.r_sq,
            f.fidelity,
            f.corr_beta,
        ];
        let line: Vec<String> = cols.iter().map(|&x| fmt_float(x)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

pub fn write_wavepacket_csv(path: &Path, slice: &WavepacketSlice) -> Result<()> {
    let mut out = String::from("q,rho_level0,rho_level1,rho_total\n");
    for i in 0..slice.q.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_float(slice.q[i]),
            fmt_float(slice.density_level0[i]),
            fmt_float(slice.density_level1[i]),
            fmt_float(slice.total[i]),
        ));
    }
    write_atomic(path, out.as_bytes())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}
