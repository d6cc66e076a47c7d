use std::collections::BTreeMap;

use passfeas_client::FeasibilityClient;
use passfeas_core::feasibility::{evaluate_scenario, ModelParams, Mode};
use passfeas_core::io::{generate_synthetic, LoadOptions, ScenarioRecord, SynthConfig, ValueMap, MAP_HEIGHT, MAP_WIDTH};
use passfeas_core::wire::{EpvCombineRequest, ScenarioRequest};
use passfeas_core::ValueKind;
use passfeas_service::{serve_with_shutdown, AppState};
use tokio::net::TcpListener;
use tokio::sync::oneshot;

async fn spawn_service() -> (FeasibilityClient, oneshot::Sender<()>) {
    let mut maps = BTreeMap::new();
    maps.insert("flat".to_string(), ValueMap::uniform(MAP_WIDTH, MAP_HEIGHT, 0.015).unwrap());
    let state = AppState::new(ModelParams::default(), LoadOptions::default(), maps);
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let (tx, rx) = oneshot::channel();
    tokio::spawn(serve_with_shutdown(listener, state, async {
        let _ = rx.await;
    }));
    (FeasibilityClient::new(&format!("http://{addr}")).unwrap(), tx)
}

#[tokio::test]
async fn client_round_trip_matches_library() {
    let (client, stop) = spawn_service().await;
    assert!(client.health().await.unwrap());
    assert_eq!(client.maps().await.unwrap(), ["flat"]);

    let scenarios = generate_synthetic(&SynthConfig {
        n_events: 5,
        seed: 21,
        ..SynthConfig::default()
    })
    .unwrap();
    let params = ModelParams::default();
    for s in &scenarios {
        let scenario = ScenarioRecord::from_scenario(s, None);
        for mode in [Mode::F, Mode::Fpd] {
            let req = ScenarioRequest {
                scenario: scenario.clone(),
                mode,
                map: None,
            };
            let res = client.evaluate(&req).await.unwrap();
            let lib = evaluate_scenario(s, &params, mode).unwrap();
            assert_eq!(res.ranking, lib.ranking);
            for r in &lib.receivers {
                assert_eq!(res.receiver(&r.breakdown.receiver_id).unwrap().breakdown, r.breakdown);
            }
        }
        let combined = client
            .epv_combine(&EpvCombineRequest {
                scenario,
                map: "flat".into(),
                kind: ValueKind::Epv,
                q: None,
                s: None,
            })
            .await
            .unwrap();
        assert!(combined.receivers.iter().all(|r| r.value == 0.015));
    }
    let _ = stop.send(());
}

#[tokio::test]
async fn service_errors_surface_with_status() {
    let (client, stop) = spawn_service().await;
    let s = &generate_synthetic(&SynthConfig {
        n_events: 1,
        ..SynthConfig::default()
    })
    .unwrap()[0];
    let req = ScenarioRequest {
        scenario: ScenarioRecord::from_scenario(s, None),
        mode: Mode::F,
        map: Some("missing".into()),
    };
    let err = client.evaluate(&req).await.unwrap_err();
    assert_eq!(err.status().map(|s| s.as_u16()), Some(404));
    assert!(err.to_string().contains("missing"));
    let _ = stop.send(());
}

#[tokio::test]
async fn unreachable_service_is_a_transport_error() {
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    drop(listener);
    let client = FeasibilityClient::new(&format!("http://{addr}/")).unwrap();
    let err = client.maps().await.unwrap_err();
    assert!(err.status().is_none());
    assert!(FeasibilityClient::new("not a url").is_err());
}
