//! Fixed-step explicit Dormand-Prince 8(5,3) stage scheme, used at its 8th-order weights only.

pub const STAGES: usize = 12;

/// Stage abscissae.
pub const C: [f64; STAGES] = [
    0.0,
    5.260_015_195_876_773E-2,
    7.890_022_793_815_16E-2,
    1.183_503_419_072_274E-1,
    2.816_496_580_927_726E-1,
    3.333_333_333_333_333E-1,
    0.25,
    3.076_923_076_923_077E-1,
    6.512_820_512_820_513E-1,
    0.6,
    8.571_428_571_428_571E-1,
    1.0,
];

const A: [[f64; STAGES]; STAGES] = [
    [0.0; STAGES],
    [5.260_015_195_876_773E-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.972_505_698_453_79E-2, 5.917_517_095_361_37E-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [2.958_758_547_680_685E-2, 0.0, 8.876_275_643_042_054E-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [
        2.413_651_341_592_667E-1, 0.0, -8.845_494_793_282_861E-1, 9.248_340_032_617_92E-1,
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
    ],
    [
        3.703_703_703_703_703_5E-2, 0.0, 0.0, 1.708_286_087_294_738_6E-1,
        1.254_676_875_668_224_2E-1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
    ],
    [
        3.7109375E-2, 0.0, 0.0, 1.702_522_110_195_440_5E-1, 6.021_653_898_045_596E-2,
        -1.7578125E-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
    ],
    [
        3.709_200_011_850_479E-2, 0.0, 0.0, 1.703_839_257_122_399_8E-1,
        1.072_620_304_463_732_8E-1, -1.531_943_774_862_440_2E-2, 8.273_789_163_814_023E-3,
        0.0, 0.0, 0.0, 0.0, 0.0,
    ],
    [
        6.241_109_587_160_757E-1, 0.0, 0.0, -3.360_892_629_446_941_4, -8.682_193_468_417_26E-1,
        2.759_209_969_944_671E1, 2.015_406_755_047_789_4E1, -4.348_988_418_106_996E1,
        0.0, 0.0, 0.0, 0.0,
    ],
    [
        4.776_625_364_382_643_4E-1, 0.0, 0.0, -2.488_114_619_971_667_7, -5.902_908_268_368_43E-1,
        2.123_005_144_818_119_3E1, 1.527_923_363_288_242_3E1, -3.328_821_096_898_486E1,
        -2.033_120_170_850_862_7E-2, 0.0, 0.0, 0.0,
    ],
    [
        -9.371_424_300_859_873E-1, 0.0, 0.0, 5.186_372_428_844_064, 1.091_437_348_996_729_5,
        -8.149_787_010_746_927, -1.852_006_565_999_696E1, 2.273_948_709_935_050_5E1,
        2.493_605_552_679_652_3, -3.046_764_471_898_219_6, 0.0, 0.0,
    ],
    [
        2.273_310_147_516_538, 0.0, 0.0, -1.053_449_546_673_725E1, -2.000_872_058_224_862_5,
        -1.795_893_186_311_88E1, 2.794_888_452_941_996E1, -2.858_998_277_135_023_5,
        -8.872_856_933_530_63, 1.236_056_717_579_430_3E1, 6.433_927_460_157_636E-1, 0.0,
    ],
];

const B: [f64; STAGES] = [
    5.429_373_411_656_876_5E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450_312_892_752_409,
    1.891_517_899_314_500_3,
    -5.801_203_960_010_585,
    3.111_643_669_578_199E-1,
    -1.521_609_496_625_161E-1,
    2.013_654_008_040_303_4E-1,
    4.471_061_572_777_259E-2,
];

/// One step of size `h`. `f(i, y)` is the derivative at stage `i`, i.e. at `x + C[i] h`.
pub fn dop853_step<const N: usize>(
    h: f64,
    y: &[f64; N],
    mut f: impl FnMut(usize, &[f64; N]) -> [f64; N],
) -> [f64; N] {
    let mut k = [[0.0; N]; STAGES];
    for i in 0..STAGES {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(i) {
            let a = A[i][j];
            if a != 0.0 {
                for (s, d) in ys.iter_mut().zip(kj) {
                    *s += h * a * d;
                }
            }
        }
        k[i] = f(i, &ys);
    }
    let mut out = *y;
    for (b, ki) in B.iter().zip(&k) {
        if *b != 0.0 {
            for (o, d) in out.iter_mut().zip(ki) {
                *o += h * b * d;
            }
        }
    }
    out
}
