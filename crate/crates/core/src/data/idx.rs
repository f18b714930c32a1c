use std::path::Path;

use crate::error::{io_err, parse_err, HohlError, Result};
use crate::graph::{Metric, PointCloud};

fn read_u32(buf: &[u8], at: usize) -> u32 {
    u32::from_be_bytes([buf[at], buf[at + 1], buf[at + 2], buf[at + 3]])
}

/// Parses an IDX header with unsigned-byte payload; returns the dimensions
/// and the payload offset.
fn header(buf: &[u8], path: &Path, rank: u8) -> Result<(Vec<usize>, usize)> {
    if buf.len() < 4 || buf[0] != 0 || buf[1] != 0 {
        return Err(parse_err(path, 1, "not an IDX file"));
    }
    if buf[2] != 0x08 {
        return Err(parse_err(path, 1, format!("unsupported IDX element type 0x{:02x}", buf[2])));
    }
    if buf[3] != rank {
        return Err(parse_err(path, 1, format!("expected rank {rank}, found {}", buf[3])));
    }
    let off = 4 + 4 * rank as usize;
    if buf.len() < off {
        return Err(parse_err(path, 1, "truncated IDX header"));
    }
    let dims: Vec<usize> = (0..rank as usize).map(|k| read_u32(buf, 4 + 4 * k) as usize).collect();
    let need = dims.iter().product::<usize>() + off;
    if buf.len() < need {
        return Err(parse_err(path, 1, format!("IDX payload truncated: {} of {need} bytes", buf.len())));
    }
    Ok((dims, off))
}

/// MNIST-style IDX image and label files. Images become rows of a cosine
/// point cloud (raw pixel intensities); at most `limit` images are read.
pub fn load_idx(images: &Path, labels: &Path, limit: Option<usize>) -> Result<(PointCloud, Vec<usize>)> {
    let ib = std::fs::read(images).map_err(|e| io_err(images, e))?;
    let lb = std::fs::read(labels).map_err(|e| io_err(labels, e))?;
    let (idims, ioff) = header(&ib, images, 3)?;
    let (ldims, loff) = header(&lb, labels, 1)?;
    if idims[0] != ldims[0] {
        return Err(HohlError::InvalidInput(format!(
            "{} images but {} labels",
            idims[0], ldims[0]
        )));
    }
    let count = limit.map_or(idims[0], |l| l.min(idims[0]));
    let d = idims[1] * idims[2];
    let data: Vec<f64> = ib[ioff..ioff + count * d].iter().map(|&b| b as f64).collect();
    let y: Vec<usize> = lb[loff..loff + count].iter().map(|&b| b as usize).collect();
    Ok((PointCloud::new(d.max(1), data, Metric::Cosine)?, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(name: &str, bytes: &[u8]) -> std::path::PathBuf {
        let p = std::env::temp_dir().join(format!("hohl-idx-{}-{name}", std::process::id()));
        std::fs::write(&p, bytes).unwrap();
        p
    }

    #[test]
    fn small_idx_roundtrip() {
        let mut img = vec![0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0, 2];
        img.extend_from_slice(&[1, 2, 3, 4]);
        let lab = vec![0, 0, 8, 1, 0, 0, 0, 2, 7, 3];
        let (ip, lp) = (write("i", &img), write("l", &lab));
        let (pc, y) = load_idx(&ip, &lp, None).unwrap();
        assert_eq!((pc.n(), pc.dim()), (2, 2));
        assert_eq!(pc.point(1), &[3.0, 4.0]);
        assert_eq!(y, vec![7, 3]);
        let (pc0, y0) = load_idx(&ip, &lp, Some(0)).unwrap();
        assert_eq!((pc0.n(), y0.len()), (0, 0));
        let bad = write("bad", &img[..18]);
        assert!(load_idx(&bad, &lp, None).is_err());
    }
}
