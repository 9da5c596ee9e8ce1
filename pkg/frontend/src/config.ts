export interface PanelConfig {
  bridgeUrl: string;
  restBase: string;
  maxLinearMps: number; // forward speed at full deflection
  maxAngularRps: number; // turn rate at full deflection
  publishRateHz: number; // twist stream rate while the stick is engaged
}

export const DEFAULT_CONFIG: PanelConfig = {
  bridgeUrl: "ws://127.0.0.1:9090/ws",
  restBase: "http://127.0.0.1:8080",
  maxLinearMps: 0.5,
  maxAngularRps: 1.0,
  publishRateHz: 10,
};

export function validateConfig(config: PanelConfig): PanelConfig {
  if (config.maxLinearMps <= 0 || config.maxAngularRps <= 0) {
    throw new Error("speed limits must be positive");
  }
  if (config.publishRateHz < 1 || config.publishRateHz > 30) {
    throw new Error("publish rate must be within [1, 30] Hz");
  }
  return config;
}
