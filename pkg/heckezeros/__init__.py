# heckezeros -- zeros of derivatives of Hecke L-functions, counted and checked at desk scale
