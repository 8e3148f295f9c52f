//! Scores two synthetic collections against the five suspicion criteria:
//! one that was pumped and abandoned, one that keeps trading.

use chrono::NaiveDate;
use nftsquat::fpfilter::{
    evaluate, DailyFloorSeries, FilterThresholds, FloorPoint, MonthCount, MonthlyTransferSeries, SocialActivity,
    YearMonth,
};
use nftsquat::ingest::{ExternalLabel, LabelKind};
use nftsquat::types::{milli_ether, Address};

fn floor(contract: Address, prices: &[(u32, u64)]) -> DailyFloorSeries {
    let points = prices
        .iter()
        .map(|&(day, milli)| FloorPoint {
            day: NaiveDate::from_ymd_opt(2022, 1, day).unwrap(),
            floor_price_wei: milli_ether(milli),
        })
        .collect();
    DailyFloorSeries { contract, points }
}

fn monthly(contract: Address, counts: &[u64]) -> MonthlyTransferSeries {
    let mut month = YearMonth::new(2022, 1).unwrap();
    let mut points = Vec::new();
    for &count in counts {
        points.push(MonthCount { month, count });
        month = month.next();
    }
    MonthlyTransferSeries { contract, points }
}

fn main() -> nftsquat::Result<()> {
    let t = FilterThresholds::default();
    let jan = 1_640_995_200;
    let day = 86_400;

    let scam = Address::from_low_u64(0x5ca);
    let label = [ExternalLabel { source: "etherscan".into(), label: LabelKind::Phishing }];
    let v = evaluate(
        scam,
        &floor(scam, &[(3, 1000), (6, 400), (12, 40)]),
        &monthly(scam, &[40, 3, 0, 0]),
        &SocialActivity { contract: scam, post_timestamps: vec![jan + day], last_onchain_activity: jan + 12 * day },
        &label,
        true,
        &t,
    )?;
    println!("abandoned: {:?} -> {} of 5, suspicious = {}", v.criteria, v.satisfied_count, v.suspicious);

    let fine = Address::from_low_u64(0xf1e);
    let v = evaluate(
        fine,
        &floor(fine, &[(3, 300), (10, 280), (20, 310)]),
        &monthly(fine, &[30, 25, 28, 31]),
        &SocialActivity { contract: fine, post_timestamps: vec![jan + 22 * day], last_onchain_activity: jan + 20 * day },
        &[],
        false,
        &t,
    )?;
    println!("active:    {:?} -> {} of 5, suspicious = {}", v.criteria, v.satisfied_count, v.suspicious);
    Ok(())
}
