//! Globally adaptive 21-point Gauss-Kronrod quadrature on finite intervals.

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_600_525_551,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// 10-point Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-15, rel_tol: 1e-9, max_intervals: 2000 }
    }
}

impl QuadratureOptions {
    pub fn halved(self) -> Self {
        Self { abs_tol: self.abs_tol / 2.0, rel_tol: self.rel_tol / 2.0, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for (j, (&x, &w)) in XGK[..10].iter().zip(&WGK[..10]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Segment { a, b, value, error }
}

/// Integrates `f` over `[points[0], points[last]]`, splitting first at every breakpoint.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    opts: &QuadratureOptions,
) -> Result<Integral> {
    let mut segments: Vec<Segment> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod(&mut f, w[0], w[1]))
        .collect();
    if segments.is_empty() {
        return Ok(Integral { value: 0.0, error: 0.0, intervals: 0 });
    }
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature { estimate: value, error });
        }
        let tol = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= tol {
            return Ok(Integral { value, error, intervals: segments.len() });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| (s.b - s.a) > 1e-14 * s.a.abs().max(s.b.abs()).max(1e-300))
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .ok_or(Error::Quadrature { estimate: value, error })?;
        if segments.len() >= opts.max_intervals {
            return Err(Error::Quadrature { estimate: value, error });
        }
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        segments.push(kronrod(&mut f, s.a, mid));
        segments.push(kronrod(&mut f, mid, s.b));
    }
}
