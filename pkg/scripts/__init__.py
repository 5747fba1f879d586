# Scripts package

