export * from './schema';
export * from './coords';
export * from './taskView';
export * from './client';
export * from './session';
