pub const TNUM_TSKID: i32 = 1;
pub const TSKID_1: i32 = 1;
pub const TNUM_SEMID: i32 = 0;
pub const TNUM_DTQID: i32 = 0;
pub const TNUM_ISRID: i32 = 1;
pub const ISRID_tISR_SIOPortTarget1_ISRInstance: i32 = 1;
pub const TNUM_INIRTN: i32 = 2;
pub const TNUM_TERRTN: i32 = 2;
